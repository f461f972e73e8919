#pragma once
// Batch driver: builds models and measures from a config tree, runs the
// selected verification suites, and collects machine-readable reports with
// pass/fail verdicts. Used by the command-line tool and by the acceptance
// tests.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "identities.hpp"
#include "martingale.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace spinflip {

struct RunOptions {
    std::vector<std::string> suites;  // empty: take run.suites from config
    bool seed_override = false;
    std::uint64_t seed = 0;
    int mode = 0;  // 0: from config, 1: force exact, 2: force monte-carlo
    int threads = 1;
    std::string out_dir;  // empty: no files written
};

struct SuiteOutcome {
    std::string name;
    bool pass = false;
    json report;
    double ms = 0.0;
};

struct RunResult {
    std::vector<SuiteOutcome> suites;
    bool all_pass = true;
    json to_json(bool with_timing = true) const {
        json s = json::object(), t = json::object();
        for (const auto& o : suites) {
            s[o.name] = o.report;
            s[o.name]["pass"] = o.pass;
            t[o.name] = o.ms;
        }
        json out{{"suites", s}, {"all_pass", all_pass}};
        if (with_timing) out["timing_ms"] = t;
        return out;
    }
};

namespace detail {

inline DisorderMeasure measure_from_config(const ConfigTree& c, const RunOptions& o) {
    DisorderMeasure m;
    std::string method = c.get("measure.method", "gauss-hermite");
    if (o.mode == 1) method = "gauss-hermite";
    if (o.mode == 2) method = "monte-carlo";
    if (method == "gauss-hermite") {
        m.method = DisorderMethod::GaussHermite;
        m.nodes_per_dim = (int)c.get_int("measure.nodes_per_dim", 32);
    } else if (method == "monte-carlo") {
        m.method = DisorderMethod::MonteCarlo;
        m.n_samples = (int)c.get_int("measure.n_samples", 10000);
        if (o.seed_override)
            m.seed = o.seed;
        else if (c.has("measure.seed"))
            m.seed = (std::uint64_t)c.get_int("measure.seed");
        else
            throw std::runtime_error("config: monte-carlo mode requires a seed");
    } else {
        throw std::runtime_error("config: unknown measure method " + method);
    }
    m.dim_cap = (int)c.get_int("measure.dim_cap", 6);
    return m;
}

inline std::vector<int> region_sites_of(const InteractionModel& m) {
    std::vector<int> r;
    for (int i = 0; i < m.n_sites(); ++i)
        if (m.region_mask() & (1u << i)) r.push_back(i);
    return r;
}

inline bool lemma_pass(const ConfigTree& c, const IdentityReport& r, bool check_mean_formula) {
    double tol = c.get_double("run.tol_exact", 1e-6);
    double tol_mean = c.get_double("run.tol_mean", 1e-8);
    double nsig = c.get_double("run.mc_sigma", 3.0);
    bool ok;
    if (r.lhs.exact) {
        ok = r.relative_residual() < tol;
        if (check_mean_formula)
            ok = ok && std::abs(r.mean_direct.value - r.mean_formula.value) < tol;
        else
            ok = ok && std::abs(r.mean_direct.value) < tol_mean;
    } else {
        double se = r.residual_se;
        ok = se > 0 ? std::abs(r.residual) < nsig * se : r.relative_residual() < tol;
    }
    return ok;
}

}  // namespace detail

using LemmaCheckFn = IdentityReport (*)(const InteractionModel&, const DisorderMeasure&,
                                        double, const CheckOptions&);

inline SuiteOutcome run_lemma_suite(const std::string& name, LemmaCheckFn check,
                                    bool mean_formula, const ConfigTree& cfg,
                                    const RunOptions& opt) {
    SuiteOutcome out;
    out.name = name;
    InteractionModel m = model_from_config(cfg);
    DisorderMeasure meas = detail::measure_from_config(cfg, opt);
    CheckOptions co;
    co.n_param_nodes = (int)cfg.get_int("run.param_nodes", 48);
    co.enum_cap = (int)cfg.get_int("run.enum_cap", 20);
    co.n_threads = opt.threads;
    json arr = json::array();
    out.pass = true;
    for (double beta : cfg.get_doubles("run.betas")) {
        IdentityReport r = check(m, meas, beta, co);
        bool ok = detail::lemma_pass(cfg, r, mean_formula);
        json j = to_json(r);
        j["beta"] = beta;
        j["pass"] = ok;
        arr.push_back(j);
        out.pass = out.pass && ok;
    }
    out.report = json{{"checks", arr}};
    return out;
}

inline SuiteOutcome run_theorem1_suite(const ConfigTree& cfg, const RunOptions& opt) {
    SuiteOutcome out;
    out.name = "theorem1";
    InteractionModel m = model_from_config(cfg);
    DisorderMeasure meas = detail::measure_from_config(cfg, opt);
    CheckOptions co;
    co.n_param_nodes = (int)cfg.get_int("run.param_nodes", 48);
    co.enum_cap = (int)cfg.get_int("run.enum_cap", 20);
    co.n_threads = opt.threads;
    json arr = json::array();
    for (double beta : cfg.get_doubles("run.betas")) {
        QuenchedEstimate c = theorem1_functional(m, meas, beta, Theorem1Part::Centered, co);
        QuenchedEstimate f = theorem1_functional(m, meas, beta, Theorem1Part::Full, co);
        arr.push_back(json{{"beta", beta},
                           {"centered", to_json(c)},
                           {"centered_nonnegative", c.value >= -1e-12},
                           {"full", to_json(f)}});
    }
    out.report = json{{"functionals", arr},
                      {"note", "values reported; vanishing is a volume-limit statement"}};
    out.pass = true;
    return out;
}

inline SuiteOutcome run_theorem2_suite(const ConfigTree& cfg, const RunOptions& opt) {
    SuiteOutcome out;
    out.name = "theorem2";
    InteractionModel base = model_from_config(cfg);
    DisorderMeasure meas = detail::measure_from_config(cfg, opt);
    CheckOptions co;
    co.n_param_nodes = (int)cfg.get_int("run.param_nodes", 48);
    co.enum_cap = (int)cfg.get_int("run.enum_cap", 20);
    co.n_threads = opt.threads;
    double mu1 = cfg.get_double("theorem2.mu1", 0.0);
    double mu2 = cfg.get_double("theorem2.mu2", 0.6);
    int n_mu = (int)cfg.get_int("theorem2.n_mu", 5);
    // mean family mu_X = mu * mu'_X with mu'_X the base-model means
    auto family = [&](double mu) {
        std::vector<Interaction> is = base.interactions();
        for (auto& it : is) it.mu *= mu;
        return InteractionModel(base.n_sites(), std::move(is),
                                detail::region_sites_of(base), base.lattice());
    };
    json arr = json::array();
    for (double beta : cfg.get_doubles("run.betas")) {
        MuAverageResult r = theorem2_mu_average(family, meas, beta, mu1, mu2, n_mu, co);
        arr.push_back(json{{"beta", beta},
                           {"mu_interval", json::array({mu1, mu2})},
                           {"n_mu", n_mu},
                           {"value", to_json(r.value)},
                           {"mag_fluct_mid_t", to_json(r.mag_fluct)}});
    }
    out.report = json{{"functionals", arr}};
    out.pass = true;
    return out;
}

inline SuiteOutcome run_theorem3_suite(const ConfigTree& cfg, const RunOptions& opt) {
    SuiteOutcome out;
    out.name = "theorem3";
    InteractionModel m = model_from_config(cfg);
    DisorderMeasure meas = detail::measure_from_config(cfg, opt);
    CheckOptions co;
    co.n_param_nodes = (int)cfg.get_int("run.param_nodes", 48);
    co.enum_cap = (int)cfg.get_int("run.enum_cap", 20);
    co.n_threads = opt.threads;
    json arr = json::array();
    for (double beta : cfg.get_doubles("run.betas")) {
        QuenchedEstimate v = theorem3_linear_functional(m, meas, beta, co);
        arr.push_back(json{{"beta", beta}, {"value", to_json(v)}});
    }
    out.report = json{{"functionals", arr}};
    out.pass = true;
    return out;
}

/// Random small-model instances for the algebraic replicon identity.
inline SuiteOutcome run_replicon_suite(const ConfigTree& cfg, const RunOptions& opt) {
    SuiteOutcome out;
    out.name = "replicon";
    int n_inst = (int)cfg.get_int("replicon.instances", 100);
    double tol = cfg.get_double("replicon.tol", 1e-12);
    std::uint64_t seed = opt.seed_override ? opt.seed
                                           : (std::uint64_t)cfg.get_int("replicon.seed", 2024);
    double beta_max = cfg.get_double("replicon.beta_max", 1.5);
    double worst = 0;
    int done = 0;
    for (int inst = 0; inst < n_inst; ++inst) {
        std::uint64_t ctr = 0;
        auto u = [&] { return rng::uniform01(rng::counter_hash(seed, inst, ctr++)); };
        int n = 2 + (int)(u() * 4.9999);  // 2..6 sites
        std::vector<Interaction> is;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (u() < 0.5) is.push_back({{i, j}, u() - 0.5, 0.2 + 1.3 * u()});
        for (int i = 0; i < n; ++i)
            if (u() < 0.5) is.push_back({{i}, u() - 0.5, 0.2 + 1.3 * u()});
        if (is.empty()) is.push_back({{0}, u() - 0.5, 0.2 + 1.3 * u()});
        std::vector<int> region;
        for (int i = 0; i < n; ++i)
            if (u() < 0.5) region.push_back(i);
        if (region.empty()) region.push_back((int)(u() * n) % n);
        InteractionModel m(n, std::move(is), std::move(region));
        CouplingAssignment c;
        for (int k = 0; k < m.n_interactions(); ++k) {
            const auto& it = m.interactions()[k];
            c.j.push_back(it.mu + std::sqrt(it.delta2) *
                                      rng::gaussian(seed ^ 0xabcdULL, inst, k));
        }
        for (std::size_t r = 0; r < m.interior().size(); ++r) {
            const auto& it = m.interactions()[m.interior()[r]];
            c.jt.push_back(it.mu + std::sqrt(it.delta2) *
                                       rng::gaussian(seed ^ 0xdcbaULL, inst, r));
        }
        double beta = beta_max * u(), t = M_PI * u(), s = M_PI * u();
        RepliconResult rr = replicon_two_ways(m, c, beta, t, s);
        worst = std::max(worst, rr.residual);
        ++done;
    }
    out.pass = worst < tol;
    out.report = json{{"instances", done}, {"max_residual", worst}, {"tolerance", tol}};
    return out;
}

inline SuiteOutcome run_martingale_suite(const ConfigTree& cfg, const RunOptions& opt) {
    SuiteOutcome out;
    out.name = "martingale";
    InteractionModel m = model_from_config(cfg);
    DisorderMeasure meas = detail::measure_from_config(cfg, opt);
    if (meas.method != DisorderMethod::GaussHermite)
        throw std::runtime_error("martingale suite requires quadrature mode");
    double tol = cfg.get_double("martingale.tol", 1e-8);
    int cap = (int)cfg.get_int("run.enum_cap", 20);
    json arr = json::array();
    out.pass = true;
    for (double beta : cfg.get_doubles("run.betas")) {
        MartingaleDecomposition d0 = decompose(m, meas, beta, FlipKind::Centered, cap);
        MartingaleDecomposition df = decompose(m, meas, beta, FlipKind::Full, cap);
        TailReport t0 = tail_vanishing_check(d0, tol);
        TailReport tf = tail_vanishing_check(df, tol);
        BoundReport b0 = bound_check(m, beta, d0.variance, FlipKind::Centered);
        BoundReport bf = bound_check(m, beta, df.variance, FlipKind::Full);
        double max_off = 0;
        for (int k = 0; k < d0.n_couplings; ++k)
            for (int j = 0; j < d0.n_couplings; ++j)
                if (j != k) max_off = std::max(max_off, std::abs(d0.cross[k][j]));
        bool ok = max_off < tol && std::abs(d0.sum_psi_sq - d0.variance) < tol &&
                  d0.telescoping_residual < tol && t0.vanishes && b0.holds && bf.holds;
        out.pass = out.pass && ok;
        arr.push_back(json{{"beta", beta},
                           {"centered", to_json(d0)},
                           {"full", to_json(df)},
                           {"tail_centered", json{{"vanishes", t0.vanishes},
                                                  {"max", t0.max_tail}}},
                           {"tail_full", json{{"vanishes", tf.vanishes},
                                              {"max", tf.max_tail}}},
                           {"bound_centered", to_json(b0)},
                           {"bound_full", to_json(bf)},
                           {"pass", ok}});
    }
    out.report = json{{"checks", arr}};
    return out;
}

inline SuiteOutcome run_scan_suite(const ConfigTree& cfg, const RunOptions& opt) {
    SuiteOutcome out;
    out.name = "scan";
    double beta = cfg.get_double("scan.beta", 0.5);
    double bond_mu = cfg.get_double("scan.bond_mu", 0.3);
    double bond_d2 = cfg.get_double("scan.bond_delta2", 1.0);
    std::vector<long> lengths = cfg.get_ints("scan.lengths");
    std::vector<long> samples = cfg.get_ints("scan.samples");
    if (samples.size() == 1) samples.assign(lengths.size(), samples[0]);
    if (samples.size() != lengths.size())
        throw std::runtime_error("config: scan.samples must match scan.lengths");
    std::uint64_t seed = opt.seed_override ? opt.seed
                                           : (std::uint64_t)cfg.get_int("scan.seed", 1);
    ScanOptions so;
    so.n_param_nodes = (int)cfg.get_int("scan.param_nodes", 8);
    so.enum_cap = (int)cfg.get_int("run.enum_cap", 20);
    so.n_threads = opt.threads;
    so.mu1 = cfg.get_double("scan.mu1", 0.0);
    so.mu2 = cfg.get_double("scan.mu2", 0.6);
    so.n_mu = (int)cfg.get_int("scan.n_mu", 3);
    auto chain_at = [&](int L, double mu) {
        ChainOptions c;
        c.n = L;
        c.bond_mu = mu;
        c.bond_delta2 = bond_d2;
        c.region_first = (L + 1) / 2;
        return chain_model(c);
    };
    so.mu_family = chain_at;
    auto family = [&](int L) { return chain_at(L, bond_mu); };
    std::vector<int> idx(lengths.begin(), lengths.end());
    auto measure_for = [&](int L) {
        for (std::size_t i = 0; i < lengths.size(); ++i)
            if (lengths[i] == L) return DisorderMeasure::mc(seed, (int)samples[i]);
        return DisorderMeasure::mc(seed, (int)samples.back());
    };
    double tau_thr = cfg.get_double("scan.tau_threshold", -0.6);
    double factor_thr = cfg.get_double("scan.decay_factor", 2.0);
    json arr = json::array();
    out.pass = true;
    for (const std::string& fname : cfg.get_words("scan.functionals")) {
        ScanFunctional f;
        if (fname == "centered") f = ScanFunctional::Centered;
        else if (fname == "full") f = ScanFunctional::Full;
        else if (fname == "mu-averaged") f = ScanFunctional::MuAveraged;
        else if (fname == "linear") f = ScanFunctional::Linear;
        else throw std::runtime_error("config: unknown scan functional " + fname);
        ScanSeries s = volume_scan(f, family, idx, measure_for, beta, so);
        bool decays = s.kendall_tau <= tau_thr && s.decay_factor >= factor_thr;
        bool ok = s.degenerate || s.statistically_zero || decays;
        out.pass = out.pass && ok;
        json j = to_json(s);
        j["pass"] = ok;
        arr.push_back(j);
        if (!opt.out_dir.empty()) {
            std::ofstream csv(opt.out_dir + "/scan_" + s.functional + ".csv");
            csv << scan_csv(s);
        }
    }
    out.report = json{{"series", arr}};
    return out;
}

inline RunResult run_suites(const ConfigTree& cfg, const RunOptions& opt) {
    std::vector<std::string> suites =
        opt.suites.empty() ? cfg.get_words("run.suites") : opt.suites;
    if (!opt.out_dir.empty()) std::filesystem::create_directories(opt.out_dir);
    RunResult res;
    for (const std::string& s : suites) {
        auto t0 = std::chrono::steady_clock::now();
        SuiteOutcome o;
        if (s == "lemma1")
            o = run_lemma_suite("lemma1", &lemma1_check, false, cfg, opt);
        else if (s == "lemma2")
            o = run_lemma_suite("lemma2", &lemma2_check, true, cfg, opt);
        else if (s == "linear")
            o = run_lemma_suite("linear", &linear_lemma_check, true, cfg, opt);
        else if (s == "theorem1")
            o = run_theorem1_suite(cfg, opt);
        else if (s == "theorem2")
            o = run_theorem2_suite(cfg, opt);
        else if (s == "theorem3")
            o = run_theorem3_suite(cfg, opt);
        else if (s == "replicon")
            o = run_replicon_suite(cfg, opt);
        else if (s == "martingale")
            o = run_martingale_suite(cfg, opt);
        else if (s == "scan")
            o = run_scan_suite(cfg, opt);
        else
            throw std::runtime_error("config: unknown suite " + s);
        o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                   .count();
        res.all_pass = res.all_pass && o.pass;
        if (!opt.out_dir.empty()) {
            std::ofstream f(opt.out_dir + "/" + o.name + ".json");
            f << o.report.dump(2) << '\n';
        }
        res.suites.push_back(std::move(o));
    }
    return res;
}

}  // namespace spinflip
