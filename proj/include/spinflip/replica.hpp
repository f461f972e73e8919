#pragma once
// Generic multi-replica quenched averages. A product spec is a list of
// replica-indexed factors drawn from {C_{a,b}, M_a} (or their per-site
// normalized versions); for fixed disorder, replica independence reduces the
// product to sums over interior interactions of one-replica moments, which
// come from the GibbsEngine cache.

#include <stdexcept>
#include <string>
#include <vector>

#include "disorder.hpp"
#include "gibbs.hpp"
#include "interpolation.hpp"
#include "model.hpp"

namespace spinflip {

struct ReplicaFactor {
    enum class Kind { Cov, Mag } kind;  // C_{a,b} or M_a
    int a = 1;                          // replica indices, 1-based
    int b = 2;
    static ReplicaFactor cov(int a, int b) {
        if (a == b) throw std::invalid_argument("replica: C_{a,a} is not a product factor");
        return {Kind::Cov, a, b};
    }
    static ReplicaFactor mag(int a) { return {Kind::Mag, a, 0}; }
};

struct ReplicaProduct {
    std::vector<ReplicaFactor> factors;
    bool normalized = false;  // divide each factor by |subregion|
    int n_replicas() const {
        int n = 0;
        for (const auto& f : factors) {
            n = std::max(n, f.a);
            if (f.kind == ReplicaFactor::Kind::Cov) n = std::max(n, f.b);
        }
        return n;
    }
};

/// Product value for one disorder realization, given the cached moments of
/// each replica (moments[r] holds replica r+1 at its own parameter).
/// Supports up to two covariance factors and any number of magnetization
/// factors with at most two observables attached per replica -- enough for
/// every term in the variance formulas.
inline double replica_product_value(const InteractionModel& m,
                                    const std::vector<const GibbsMoments*>& moments,
                                    const ReplicaProduct& spec) {
    const int nr = spec.n_replicas();
    if ((int)moments.size() < nr)
        throw std::invalid_argument("replica: a replica index has no parameter");
    std::vector<int> cov_factors;
    for (int f = 0; f < (int)spec.factors.size(); ++f)
        if (spec.factors[f].kind == ReplicaFactor::Kind::Cov) cov_factors.push_back(f);
    if (cov_factors.size() > 2)
        throw std::invalid_argument("replica: more than two covariance factors unsupported");

    const auto& interior = m.interior();
    const int mi = (int)interior.size();
    std::vector<double> d2(mi);
    for (int r = 0; r < mi; ++r) d2[r] = m.interactions()[interior[r]].delta2;

    // attachments per replica: 0 = none; each covariance factor contributes
    // its loop index, each magnetization factor contributes B
    auto moment_of = [&](int rep, int nb, int x, int y) -> double {
        // nb = number of B attachments; x,y = sigma indices (-1 if absent)
        const GibbsMoments& g = *moments[rep];
        if (nb == 0) {
            if (x < 0) return 1.0;
            if (y < 0) return g.s1[x];
            return g.s2v(x, y);
        }
        if (nb == 1) {
            if (x < 0) return g.b1;
            if (y < 0) return g.bs[x];
            throw std::invalid_argument("replica: omega(B sigma sigma) not cached");
        }
        if (nb == 2 && x < 0) return g.b2;
        throw std::invalid_argument("replica: moment order not cached");
    };

    auto term = [&](int ix, int iy) -> double {
        double v = 1.0;
        for (int rep = 0; rep < nr; ++rep) {
            int nb = 0, x = -1, y = -1;
            for (int f = 0; f < (int)spec.factors.size(); ++f) {
                const auto& fac = spec.factors[f];
                if (fac.kind == ReplicaFactor::Kind::Mag) {
                    if (fac.a == rep + 1) ++nb;
                } else {
                    int idx = (f == cov_factors[0]) ? ix : iy;
                    if (fac.a == rep + 1 || fac.b == rep + 1) {
                        if (x < 0) x = idx;
                        else if (y < 0) y = idx;
                        else throw std::invalid_argument("replica: >2 sigma attachments");
                    }
                }
            }
            v *= moment_of(rep, nb, x, y);
        }
        return v;
    };

    double out = 0;
    if (cov_factors.empty()) {
        out = term(-1, -1);
    } else if (cov_factors.size() == 1) {
        for (int ix = 0; ix < mi; ++ix) out += d2[ix] * term(ix, -1);
    } else {
        for (int ix = 0; ix < mi; ++ix)
            for (int iy = 0; iy < mi; ++iy) out += d2[ix] * d2[iy] * term(ix, iy);
    }
    if (spec.normalized) {
        double norm = 1.0;
        for (std::size_t f = 0; f < spec.factors.size(); ++f) norm *= m.region_size();
        out /= norm;
    }
    return out;
}

/// Quenched average of a replica product with positional parameters: params[r]
/// is the interpolation parameter of replica r+1.
inline QuenchedEstimate multi_replica_average(const InteractionModel& m,
                                              const DisorderMeasure& meas, PathKind path,
                                              const ReplicaProduct& spec,
                                              const std::vector<double>& params, double beta,
                                              int enum_cap = 20) {
    const int nr = spec.n_replicas();
    if ((int)params.size() < nr)
        throw std::invalid_argument("replica: a replica index has no parameter");
    GibbsEngine eng(m, enum_cap);
    bool tilde = path != PathKind::Linear;
    DisorderEnsemble e = make_ensemble(m, meas, tilde);
    KahanSum mean, sq;
    std::vector<double> eff;
    std::vector<GibbsMoments> gm(nr);
    for (std::size_t i = 0; i < e.size(); ++i) {
        std::vector<const GibbsMoments*> mp(nr);
        for (int r = 0; r < nr; ++r) {
            // reuse a replica's moments when an earlier one shares its parameter
            int dup = -1;
            for (int p = 0; p < r; ++p)
                if (params[p] == params[r]) { dup = p; break; }
            if (dup >= 0) {
                mp[r] = mp[dup];
                continue;
            }
            effective_couplings(m, e.draws[i], path, params[r], eff);
            gm[r] = eng.moments(eff, beta);
            mp[r] = &gm[r];
        }
        double v = replica_product_value(m, mp, spec);
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

}  // namespace spinflip
