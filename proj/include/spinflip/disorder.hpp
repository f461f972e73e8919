#pragma once
// Gaussian disorder measures over the coupling family. Exact expectations use
// tensor Gauss-Hermite over all coupling dimensions (J first, then the tilde
// family), Monte Carlo uses the counter-based stream so that estimates are a
// pure function of (model, measure, seed).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace spinflip {

enum class DisorderMethod { MonteCarlo, GaussHermite };

struct DisorderMeasure {
    DisorderMethod method = DisorderMethod::GaussHermite;
    std::uint64_t seed = 0;
    int n_samples = 0;      // Monte Carlo
    int nodes_per_dim = 32; // Gauss-Hermite
    int dim_cap = 6;
    static DisorderMeasure exact(int nodes) {
        DisorderMeasure m;
        m.method = DisorderMethod::GaussHermite;
        m.nodes_per_dim = nodes;
        return m;
    }
    static DisorderMeasure mc(std::uint64_t seed, int n) {
        DisorderMeasure m;
        m.method = DisorderMethod::MonteCarlo;
        m.seed = seed;
        m.n_samples = n;
        return m;
    }
};

struct QuenchedEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = true;
    int n_draws = 0;
    std::string method;  // "gauss-hermite(q)" or "monte-carlo(n,seed)"
};

/// Draw one realization. Gaussian index convention: index k in [0, nJ) feeds
/// J_k, index nJ + r feeds the tilde value of the r-th interior interaction.
inline CouplingAssignment sample_couplings(const InteractionModel& m, std::uint64_t seed,
                                           std::uint64_t sample, bool with_tilde) {
    CouplingAssignment c;
    int nj = m.n_interactions();
    c.j.resize(nj);
    for (int k = 0; k < nj; ++k) {
        const auto& it = m.interactions()[k];
        c.j[k] = it.mu + std::sqrt(it.delta2) * rng::gaussian(seed, sample, k);
    }
    if (with_tilde) {
        c.jt.resize(m.interior().size());
        for (std::size_t r = 0; r < m.interior().size(); ++r) {
            const auto& it = m.interactions()[m.interior()[r]];
            c.jt[r] = it.mu + std::sqrt(it.delta2) * rng::gaussian(seed, sample, nj + r);
        }
    }
    return c;
}

/// Materialized disorder measure: a weighted list of realizations. Exact mode
/// enumerates the tensor Gauss-Hermite grid (J = mu + sqrt(2 Delta^2) u with
/// physicists' nodes u); weights sum to 1 in both modes.
struct DisorderEnsemble {
    std::vector<CouplingAssignment> draws;
    std::vector<double> weights;
    bool exact = true;
    std::string method;
    std::size_t size() const { return draws.size(); }
};

inline DisorderEnsemble make_ensemble(const InteractionModel& m, const DisorderMeasure& meas,
                                      bool with_tilde) {
    DisorderEnsemble e;
    if (meas.method == DisorderMethod::MonteCarlo) {
        if (meas.n_samples <= 0) throw std::invalid_argument("disorder: n_samples must be positive");
        e.exact = false;
        e.method = "monte-carlo(" + std::to_string(meas.n_samples) + ",seed=" +
                   std::to_string(meas.seed) + ")";
        e.draws.reserve(meas.n_samples);
        for (int s = 0; s < meas.n_samples; ++s)
            e.draws.push_back(sample_couplings(m, meas.seed, s, with_tilde));
        e.weights.assign(meas.n_samples, 1.0 / meas.n_samples);
        return e;
    }
    int nj = m.n_interactions();
    int nt = with_tilde ? (int)m.interior().size() : 0;
    int dim = nj + nt;
    if (dim > meas.dim_cap)
        throw std::invalid_argument("disorder: Gaussian dimension " + std::to_string(dim) +
                                    " exceeds quadrature cap " + std::to_string(meas.dim_cap));
    QuadratureRule gh = gauss_hermite_prob(meas.nodes_per_dim);
    int q = (int)gh.size();
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= q;
    e.exact = true;
    e.method = "gauss-hermite(" + std::to_string(meas.nodes_per_dim) + "/dim)";
    e.draws.reserve(total);
    e.weights.reserve(total);
    std::vector<int> idx(dim, 0);
    CouplingAssignment c;
    c.j.resize(nj);
    c.jt.resize(nt);
    for (std::size_t count = 0; count < total; ++count) {
        double w = 1.0;
        for (int d = 0; d < dim; ++d) w *= gh.weights[idx[d]];
        for (int k = 0; k < nj; ++k) {
            const auto& it = m.interactions()[k];
            c.j[k] = it.mu + std::sqrt(2.0 * it.delta2) * gh.nodes[idx[k]];
        }
        for (int r = 0; r < nt; ++r) {
            const auto& it = m.interactions()[m.interior()[r]];
            c.jt[r] = it.mu + std::sqrt(2.0 * it.delta2) * gh.nodes[idx[nj + r]];
        }
        e.draws.push_back(c);
        e.weights.push_back(w);
        for (int d = dim - 1; d >= 0; --d) {  // odometer
            if (++idx[d] < q) break;
            idx[d] = 0;
        }
    }
    return e;
}

inline QuenchedEstimate disorder_expectation(
    const std::function<double(const CouplingAssignment&)>& f, const InteractionModel& m,
    const DisorderMeasure& meas, bool with_tilde = true) {
    DisorderEnsemble e = make_ensemble(m, meas, with_tilde);
    KahanSum mean, sq;
    for (std::size_t i = 0; i < e.size(); ++i) {
        double v = f(e.draws[i]);
        mean.add(e.weights[i] * v);
        if (!e.exact) sq.add(v * v);
    }
    QuenchedEstimate q;
    q.value = mean.value();
    q.exact = e.exact;
    q.n_draws = (int)e.size();
    q.method = e.method;
    if (!e.exact && e.size() > 1) {
        double n = (double)e.size();
        double var = (sq.value() - n * q.value * q.value) / (n - 1.0);
        q.std_error = std::sqrt(std::max(0.0, var) / n);
    }
    return q;
}

/// Gaussian integration-by-parts residual for coupling i:
/// | Av(J_i psi) - Av(J_i) Av(psi) - Delta^2_i Av(dpsi/dJ_i) |.
/// The couplings are independent, so the covariance sum collapses to j = i.
/// When no analytic derivative is supplied a central difference with
/// h = eps^{1/3} max(1,|J_i|) is used.
inline double ibp_residual(
    const InteractionModel& m, const DisorderMeasure& meas, int i,
    const std::function<double(const CouplingAssignment&)>& psi,
    const std::function<double(const CouplingAssignment&)>& dpsi_di = nullptr,
    bool with_tilde = false) {
    if (meas.method != DisorderMethod::GaussHermite)
        throw std::invalid_argument("ibp_residual: quadrature mode required");
    DisorderEnsemble e = make_ensemble(m, meas, with_tilde);
    const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    KahanSum xpsi, avpsi, avd;
    for (std::size_t n = 0; n < e.size(); ++n) {
        const auto& c = e.draws[n];
        double p = psi(c);
        xpsi.add(e.weights[n] * c.j[i] * p);
        avpsi.add(e.weights[n] * p);
        double d;
        if (dpsi_di) {
            d = dpsi_di(c);
        } else {
            double h = h0 * std::max(1.0, std::abs(c.j[i]));
            CouplingAssignment cp = c, cm = c;
            cp.j[i] += h;
            cm.j[i] -= h;
            d = (psi(cp) - psi(cm)) / (2.0 * h);
        }
        avd.add(e.weights[n] * d);
    }
    double mu_i = m.interactions()[i].mu, d2_i = m.interactions()[i].delta2;
    return std::abs(xpsi.value() - mu_i * avpsi.value() - d2_i * avd.value());
}

}  // namespace spinflip
