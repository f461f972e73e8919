#pragma once
// JSON / CSV serialization of reports. JSON objects are emitted with sorted
// keys, so identical runs produce identical files; timing fields are the only
// run-dependent entries and live under "timing_ms" keys.

#include <json.hpp>
#include <sstream>
#include <string>

#include "disorder.hpp"
#include "gibbs.hpp"
#include "identities.hpp"
#include "martingale.hpp"

namespace spinflip {

using json = nlohmann::json;

inline json to_json(const QuenchedEstimate& q) {
    return json{{"value", q.value},
                {"std_error", q.std_error},
                {"exact", q.exact},
                {"n_draws", q.n_draws},
                {"method", q.method}};
}

inline json to_json(const IdentityReport& r) {
    json terms = json::array();
    for (const auto& t : r.terms)
        terms.push_back(json{{"term", t.label}, {"value", t.value}, {"std_error", t.std_error}});
    json j{{"name", r.name},
           {"lhs", to_json(r.lhs)},
           {"rhs", to_json(r.rhs)},
           {"residual", r.residual},
           {"residual_std_error", r.residual_se},
           {"relative_residual", r.relative_residual()},
           {"terms", terms},
           {"method", r.method}};
    if (r.has_mean) {
        j["mean_direct"] = to_json(r.mean_direct);
        j["mean_formula"] = to_json(r.mean_formula);
    }
    return j;
}

inline json to_json(const ScanSeries& s) {
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back(json{{"index", p.index},
                           {"n_sites", p.n_sites},
                           {"region_size", p.region_size},
                           {"value", p.value},
                           {"std_error", p.std_error}});
    return json{{"functional", s.functional},
                {"points", pts},
                {"kendall_tau_abs", s.kendall_tau},
                {"decay_factor", s.decay_factor},
                {"statistically_zero", s.statistically_zero},
                {"degenerate", s.degenerate}};
}

inline json to_json(const MartingaleDecomposition& d) {
    double max_off = 0;
    for (int k = 0; k < d.n_couplings; ++k)
        for (int j = 0; j < d.n_couplings; ++j)
            if (j != k) max_off = std::max(max_off, std::abs(d.cross[k][j]));
    return json{{"ordering", d.ordering},
                {"n_couplings", d.n_couplings},
                {"interior_count", d.interior_count},
                {"mean", d.mean},
                {"variance", d.variance},
                {"psi_sq", d.psi_sq},
                {"sum_psi_sq", d.sum_psi_sq},
                {"max_cross_moment", max_off},
                {"a_sup", d.a_sup},
                {"telescoping_residual", d.telescoping_residual}};
}

inline json to_json(const BoundReport& b) {
    return json{{"cbar", b.cbar},        {"r0", b.r0},
                {"bound", b.bound},      {"variance", b.variance},
                {"allowance", b.allowance}, {"holds", b.holds},
                {"note", b.note}};
}

inline std::string scan_csv(const ScanSeries& s) {
    std::ostringstream o;
    o.precision(17);
    o << "functional,index,n_sites,region_size,value,std_error\n";
    for (const auto& p : s.points)
        o << s.functional << ',' << p.index << ',' << p.n_sites << ',' << p.region_size
          << ',' << p.value << ',' << p.std_error << '\n';
    return o.str();
}

inline std::string martingale_csv(const MartingaleDecomposition& d) {
    std::ostringstream o;
    o.precision(17);
    o << "k,a_sup,psi_sq\n";
    for (int k = 0; k < d.n_couplings; ++k)
        o << k << ',' << d.a_sup[k] << ',' << d.psi_sq[k] << '\n';
    o << d.n_couplings << ',' << d.a_sup[d.n_couplings] << ",\n";
    return o.str();
}

// flag-gated debugging dump of a one-replica moment cache
inline std::string moments_csv(const GibbsMoments& g) {
    std::ostringstream o;
    o.precision(17);
    o << "log_z," << g.log_z << "\nomega_B," << g.b1 << "\nomega_B2," << g.b2 << '\n';
    o << "x,omega_sigma,omega_B_sigma\n";
    for (int x = 0; x < g.m; ++x) o << x << ',' << g.s1[x] << ',' << g.bs[x] << '\n';
    o << "pair_matrix\n";
    for (int x = 0; x < g.m; ++x) {
        for (int y = 0; y < g.m; ++y) o << (y ? "," : "") << g.s2v(x, y);
        o << '\n';
    }
    return o.str();
}

}  // namespace spinflip
