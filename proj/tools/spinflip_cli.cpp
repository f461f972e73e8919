// Batch driver for the verification suites.
//
// Exit codes: 0 all selected checks pass, 1 at least one check failed,
// 2 configuration or usage error.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "spinflip/spinflip.hpp"

int main(int argc, char** argv) {
    CLI::App app{"interaction-flip identity verification suites"};
    std::string config_path, out_dir, suites_arg;
    std::uint64_t seed = 0;
    bool have_seed = false, force_exact = false, force_mc = false, no_timing = false;
    int threads = 1;
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--suite", suites_arg,
                   "comma-separated suite list (overrides run.suites): lemma1, lemma2, "
                   "linear, theorem1, theorem2, theorem3, martingale, replicon, scan");
    app.add_option("--out", out_dir, "directory for JSON/CSV reports");
    auto* seed_opt = app.add_option("--seed", seed, "override the Monte Carlo seed");
    app.add_option("--threads", threads, "worker threads for moment tables");
    app.add_flag("--exact", force_exact, "force Gauss-Hermite disorder quadrature");
    app.add_flag("--mc", force_mc, "force Monte Carlo disorder sampling");
    app.add_flag("--no-timing", no_timing, "omit timing fields (byte-identical reruns)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 2;
    }
    have_seed = seed_opt->count() > 0;
    if (force_exact && force_mc) {
        std::cerr << "error: --exact and --mc are mutually exclusive\n";
        return 2;
    }

    try {
        spinflip::ConfigTree cfg = spinflip::ConfigTree::parse_file(config_path);
        spinflip::RunOptions opt;
        if (!suites_arg.empty()) {
            std::string cur;
            for (char ch : suites_arg + ",") {
                if (ch == ',') {
                    if (!cur.empty()) opt.suites.push_back(cur);
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
        }
        opt.seed_override = have_seed;
        opt.seed = seed;
        opt.mode = force_exact ? 1 : (force_mc ? 2 : 0);
        opt.threads = threads;
        opt.out_dir = out_dir;
        spinflip::RunResult res = spinflip::run_suites(cfg, opt);
        spinflip::json summary = res.to_json(!no_timing);
        if (!out_dir.empty()) {
            std::ofstream f(out_dir + "/summary.json");
            f << summary.dump(2) << '\n';
        }
        std::cout << summary.dump(2) << '\n';
        for (const auto& s : res.suites)
            std::cerr << (s.pass ? "[pass] " : "[FAIL] ") << s.name << '\n';
        return res.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
