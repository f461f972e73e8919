#pragma once
// Both sides of every variance formula and identity functional, plus the
// replicon polynomial in its two equivalent forms and finite-volume decay
// scans. All quenched averages for a check are evaluated on one shared
// moment table (common random numbers in Monte Carlo mode), so residuals are
// differences of strongly correlated estimates.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "disorder.hpp"
#include "gibbs.hpp"
#include "interpolation.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace spinflip {

struct TermRow {
    std::string label;
    double value = 0.0;
    double std_error = 0.0;
};

struct IdentityReport {
    std::string name;
    QuenchedEstimate lhs, rhs;
    double residual = 0.0;
    double residual_se = 0.0;
    bool has_mean = false;
    QuenchedEstimate mean_direct, mean_formula;
    std::vector<TermRow> terms;
    std::string method;
    double relative_residual() const {
        return std::abs(residual) / std::max(1.0, std::abs(lhs.value));
    }
};

/// Cached per-(draw, parameter) Gibbs moments plus the pressure-difference
/// value per draw, for one model / path / beta.
class QuenchedTable {
public:
    QuenchedTable(const InteractionModel& model, const DisorderMeasure& meas, PathKind path,
                  int n_param_nodes, double beta, int enum_cap = 20, int n_threads = 1)
        : model_(&model), eng_(model, enum_cap), path_(path), beta_(beta) {
        auto [lo, hi] = path_domain(path);
        pr_ = gauss_legendre(n_param_nodes, lo, hi);
        for (int k : model.interior()) d2_.push_back(model.interactions()[k].delta2);
        ens_ = make_ensemble(model, meas, path != PathKind::Linear);
        const std::size_t nd = ens_.size(), np = pr_.size();
        mom_.resize(nd);
        x_.resize(nd);
        auto fill = [&](std::size_t a, std::size_t b) {
            std::vector<double> eff;
            for (std::size_t d = a; d < b; ++d) {
                x_[d] = (path == PathKind::TrigF0) ? x_centered(eng_, ens_.draws[d], beta)
                                                   : x_full(eng_, ens_.draws[d], beta);
                mom_[d].resize(np);
                for (std::size_t i = 0; i < np; ++i) {
                    effective_couplings(model, ens_.draws[d], path, pr_.nodes[i], eff);
                    mom_[d][i] = eng_.moments(eff, beta);
                }
            }
        };
        if (n_threads <= 1 || nd < 64) {
            fill(0, nd);
        } else {
            std::vector<std::thread> ts;
            std::size_t chunk = (nd + n_threads - 1) / n_threads;
            for (int t = 0; t < n_threads; ++t) {
                std::size_t a = t * chunk, b = std::min(nd, a + chunk);
                if (a < b) ts.emplace_back(fill, a, b);
            }
            for (auto& t : ts) t.join();
        }
    }

    const InteractionModel& model() const { return *model_; }
    const DisorderEnsemble& ensemble() const { return ens_; }
    const QuadratureRule& params() const { return pr_; }
    const std::vector<double>& d2() const { return d2_; }
    const std::vector<GibbsMoments>& mom(std::size_t draw) const { return mom_[draw]; }
    double x(std::size_t draw) const { return x_[draw]; }
    double beta() const { return beta_; }
    PathKind path() const { return path_; }

    /// Evaluate a statistics functional on the whole ensemble and, in MC
    /// mode, estimate standard errors from contiguous batch means.
    template <class F>
    void evaluate(F&& stats_fn, std::vector<double>& values, std::vector<double>& ses,
                  int n_batches = 16) const {
        std::vector<int> idx(ens_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = (int)i;
        values = stats_fn(*this, idx, ens_.weights);
        ses.assign(values.size(), 0.0);
        if (ens_.exact || (int)ens_.size() < 2 * n_batches) return;
        int nb = n_batches, bs = (int)ens_.size() / nb;
        std::vector<std::vector<double>> bv(nb);
        for (int b = 0; b < nb; ++b) {
            std::vector<int> bi(idx.begin() + b * bs, idx.begin() + (b + 1) * bs);
            std::vector<double> bw(bs, 1.0 / bs);
            bv[b] = stats_fn(*this, bi, bw);
        }
        for (std::size_t s = 0; s < values.size(); ++s) {
            double m = 0;
            for (int b = 0; b < nb; ++b) m += bv[b][s];
            m /= nb;
            double v = 0;
            for (int b = 0; b < nb; ++b) v += (bv[b][s] - m) * (bv[b][s] - m);
            ses[s] = std::sqrt(v / (nb - 1.0) / nb);
        }
    }

private:
    const InteractionModel* model_;
    GibbsEngine eng_;
    PathKind path_;
    double beta_;
    QuadratureRule pr_;
    std::vector<double> d2_;
    DisorderEnsemble ens_;
    std::vector<std::vector<GibbsMoments>> mom_;
    std::vector<double> x_;
};

namespace detail {

struct PairGrid {
    int np;
    std::vector<double> w2, k1, k2, h1, h2, t, s;
    explicit PairGrid(const QuadratureRule& r) : np((int)r.size()) {
        std::size_t n2 = (std::size_t)np * np;
        w2.resize(n2); k1.resize(n2); k2.resize(n2);
        h1.resize(n2); h2.resize(n2); t.resize(n2); s.resize(n2);
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j) {
                std::size_t p = (std::size_t)i * np + j;
                double ti = r.nodes[i], tj = r.nodes[j];
                w2[p] = r.weights[i] * r.weights[j];
                k1[p] = kernel_eval(Kernel::K1, ti, tj);
                k2[p] = kernel_eval(Kernel::K2, ti, tj);
                h1[p] = kernel_eval(Kernel::H1, ti, tj);
                h2[p] = kernel_eval(Kernel::H2, ti, tj);
                t[p] = ti;
                s[p] = tj;
            }
    }
};

// first/second moments of x over a draw subset
inline void x_moments(const QuenchedTable& tb, const std::vector<int>& idx,
                      const std::vector<double>& w, double& mean, double& second) {
    KahanSum m1, m2;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        double x = tb.x(idx[n]);
        m1.add(w[n] * x);
        m2.add(w[n] * x * x);
    }
    mean = m1.value();
    second = m2.value();
}

// per-parameter subset averages of omega(B) and C(t,t)
inline void param_averages(const QuenchedTable& tb, const std::vector<int>& idx,
                           const std::vector<double>& w, std::vector<double>& avM,
                           std::vector<double>& avCtt) {
    int np = (int)tb.params().size();
    std::vector<KahanSum> am(np), ac(np);
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        for (int i = 0; i < np; ++i) {
            am[i].add(w[n] * M[i].b1);
            ac[i].add(w[n] * rp_c12(M[i], M[i], tb.d2()));
        }
    }
    avM.resize(np);
    avCtt.resize(np);
    for (int i = 0; i < np; ++i) {
        avM[i] = am[i].value();
        avCtt[i] = ac[i].value();
    }
}

}  // namespace detail

// ---- variance formula for the centered flip (trig path) -------------------
// stats: {mean X0, Av(X0^2), term k1, term k2, rhs, residual}
inline std::vector<double> lemma1_stats(const QuenchedTable& tb, const std::vector<int>& idx,
                                        const std::vector<double>& w) {
    detail::PairGrid g(tb.params());
    const auto& d2 = tb.d2();
    double mean, lhs;
    detail::x_moments(tb, idx, w, mean, lhs);
    KahanSum a1, a2;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        double s1 = 0, s2 = 0;
        for (int i = 0; i < g.np; ++i)
            for (int j = 0; j < g.np; ++j) {
                std::size_t p = (std::size_t)i * g.np + j;
                double rc = rp_c12(M[i], M[j], d2);
                s1 += g.w2[p] * g.k1[p] * rc;
                double repl = rp_c12sq(M[i], M[j], d2) -
                              2.0 * rp_c12c23(M[i], M[j], M[i], d2) + rc * rc;
                s2 += g.w2[p] * g.k2[p] * repl;
            }
        a1.add(w[n] * s1);
        a2.add(w[n] * s2);
    }
    double b = tb.beta();
    double t_k1 = b * b * a1.value();
    double t_k2 = -b * b * b * b * a2.value();
    double rhs = t_k1 + t_k2;
    return {mean, lhs, t_k1, t_k2, rhs, lhs - rhs};
}

// ---- variance formula for the full flip (trig path) -----------------------
// stats: {mean X, mean formula, Var X, k1, h1, h2, k2 terms, rhs, residual}
inline std::vector<double> lemma2_stats(const QuenchedTable& tb, const std::vector<int>& idx,
                                        const std::vector<double>& w) {
    detail::PairGrid g(tb.params());
    const auto& d2 = tb.d2();
    const auto& pr = tb.params();
    double meanX, secX;
    detail::x_moments(tb, idx, w, meanX, secX);
    double varX = secX - meanX * meanX;
    std::vector<double> avM, avCtt;
    detail::param_averages(tb, idx, w, avM, avCtt);
    KahanSum a1, a2c, a3, a4;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        for (int i = 0; i < g.np; ++i)
            for (int j = 0; j < g.np; ++j) {
                std::size_t p = (std::size_t)i * g.np + j;
                double rc = rp_c12(M[i], M[j], d2);
                s1 += g.w2[p] * g.k1[p] * rc;
                s2 += g.w2[p] * g.h1[p] * M[i].b1 * M[j].b1;
                s3 += g.w2[p] * g.h2[p] *
                      (rp_m1c12(M[i], M[j], d2) - rp_m1c23(M[i], M[j], M[i], d2));
                double repl = rp_c12sq(M[i], M[j], d2) -
                              2.0 * rp_c12c23(M[j], M[i], M[j], d2) + rc * rc;
                s4 += g.w2[p] * g.k2[p] * repl;
            }
        a1.add(w[n] * s1);
        a2c.add(w[n] * s2);
        a3.add(w[n] * s3);
        a4.add(w[n] * s4);
    }
    // disconnected piece of the magnetization block and the mean formula
    double disc = 0, meanF = 0;
    for (int i = 0; i < g.np; ++i) {
        meanF += pr.weights[i] * (std::cos(pr.nodes[i]) - std::sin(pr.nodes[i])) * avM[i];
        for (int j = 0; j < g.np; ++j)
            disc += g.w2[(std::size_t)i * g.np + j] * g.h1[(std::size_t)i * g.np + j] *
                    avM[i] * avM[j];
    }
    double b = tb.beta();
    meanF *= b;
    double t_k1 = b * b * a1.value();
    double t_h1 = b * b * (a2c.value() - disc);
    double t_h2 = -2.0 * b * b * b * a3.value();
    double t_k2 = -b * b * b * b * a4.value();
    double rhs = t_k1 + t_h1 + t_h2 + t_k2;
    return {meanX, meanF, varX, t_k1, t_h1, t_h2, t_k2, rhs, varX - rhs};
}

// ---- variance formula for the linear path ---------------------------------
// stats: {mean X, mean formula, Var X, 6 terms, rhs, residual}
inline std::vector<double> lemma3_stats(const QuenchedTable& tb, const std::vector<int>& idx,
                                        const std::vector<double>& w) {
    detail::PairGrid g(tb.params());
    const auto& d2 = tb.d2();
    const auto& pr = tb.params();
    double meanX, secX;
    detail::x_moments(tb, idx, w, meanX, secX);
    double varX = secX - meanX * meanX;
    std::vector<double> avM, avCtt;
    detail::param_averages(tb, idx, w, avM, avCtt);
    KahanSum a1, a2, a3, a4, a5, a6;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0;
        for (int i = 0; i < g.np; ++i) {
            double ctt_i = rp_c12(M[i], M[i], d2);
            for (int j = 0; j < g.np; ++j) {
                std::size_t p = (std::size_t)i * g.np + j;
                double wij = g.w2[p], t = g.t[p], s = g.s[p];
                double rc = rp_c12(M[i], M[j], d2);
                s1 += wij * rc;
                s2 += wij * M[i].b1 * M[j].b1;
                s3 += wij * t *
                      (rp_m1c12(M[i], M[j], d2) - rp_m1c23(M[i], M[i], M[j], d2) -
                       rp_m1c23(M[j], M[i], M[i], d2));
                s4 += wij * t * s * ctt_i * rp_c12(M[j], M[j], d2);
                s5 += wij * t * t *
                      (rp_c12c23(M[i], M[i], M[j], d2) - ctt_i * rp_c12(M[j], M[i], d2));
                s6 += wij * t * s *
                      (rp_c12sq(M[i], M[j], d2) - 2.0 * rp_c12c23(M[i], M[j], M[i], d2) +
                       rc * rc);
            }
        }
        a1.add(w[n] * s1);
        a2.add(w[n] * s2);
        a3.add(w[n] * s3);
        a4.add(w[n] * s4);
        a5.add(w[n] * s5);
        a6.add(w[n] * s6);
    }
    // disconnected pieces and the mean formula
    double discM = 0, discT = 0, discC = 0, meanF = 0;
    for (int i = 0; i < g.np; ++i) {
        meanF += pr.weights[i] * (avM[i] + tb.beta() * pr.nodes[i] * avCtt[i]);
        for (int j = 0; j < g.np; ++j) {
            std::size_t p = (std::size_t)i * g.np + j;
            discM += g.w2[p] * avM[i] * avM[j];
            discT += g.w2[p] * g.t[p] * avCtt[i] * avM[j];
            discC += g.w2[p] * g.t[p] * g.s[p] * avCtt[i] * avCtt[j];
        }
    }
    double b = tb.beta();
    meanF *= -b;
    double t1 = b * b * a1.value();
    double t2 = b * b * (a2.value() - discM);
    double t3 = -2.0 * b * b * b * (a3.value() + discT);
    double t4 = b * b * b * b * (a4.value() - discC);
    double t5 = -4.0 * b * b * b * b * a5.value();
    double t6 = b * b * b * b * a6.value();
    double rhs = t1 + t2 + t3 + t4 + t5 + t6;
    return {meanX, meanF, varX, t1, t2, t3, t4, t5, t6, rhs, varX - rhs};
}

namespace detail {

inline QuenchedEstimate pick(const QuenchedTable& tb, const std::vector<double>& v,
                             const std::vector<double>& se, int i) {
    QuenchedEstimate q;
    q.value = v[i];
    q.std_error = se[i];
    q.exact = tb.ensemble().exact;
    q.n_draws = (int)tb.ensemble().size();
    q.method = tb.ensemble().method;
    return q;
}

}  // namespace detail

struct CheckOptions {
    int n_param_nodes = 48;
    int enum_cap = 20;
    int n_threads = 1;
};

inline IdentityReport lemma1_check(const InteractionModel& m, const DisorderMeasure& meas,
                                   double beta, const CheckOptions& o = {}) {
    QuenchedTable tb(m, meas, PathKind::TrigF0, o.n_param_nodes, beta, o.enum_cap, o.n_threads);
    std::vector<double> v, se;
    tb.evaluate(lemma1_stats, v, se);
    IdentityReport r;
    r.name = "variance-centered-flip";
    r.method = tb.ensemble().method;
    r.has_mean = true;
    r.mean_direct = detail::pick(tb, v, se, 0);
    r.mean_formula = QuenchedEstimate{};  // identically zero for the centered flip
    r.mean_formula.method = "exact-zero";
    r.lhs = detail::pick(tb, v, se, 1);
    r.terms = {{"beta^2 int k1 <C12>_{t,s}", v[2], se[2]},
               {"-beta^4 int k2 (<C12^2>_{t,s} - 2<C12C23>_{t,s,t} + <C12C34>_{t,s,s,t})",
                v[3], se[3]}};
    r.rhs = detail::pick(tb, v, se, 4);
    r.residual = v[5];
    r.residual_se = se[5];
    return r;
}

inline IdentityReport lemma2_check(const InteractionModel& m, const DisorderMeasure& meas,
                                   double beta, const CheckOptions& o = {}) {
    QuenchedTable tb(m, meas, PathKind::TrigF, o.n_param_nodes, beta, o.enum_cap, o.n_threads);
    std::vector<double> v, se;
    tb.evaluate(lemma2_stats, v, se);
    IdentityReport r;
    r.name = "variance-full-flip";
    r.method = tb.ensemble().method;
    r.has_mean = true;
    r.mean_direct = detail::pick(tb, v, se, 0);
    r.mean_formula = detail::pick(tb, v, se, 1);
    r.lhs = detail::pick(tb, v, se, 2);
    r.terms = {{"beta^2 int k1 <C12>_{t,s}", v[3], se[3]},
               {"beta^2 int h1 (<M1M2>_{t,s} - <M>_t<M>_s)", v[4], se[4]},
               {"-2beta^3 int h2 (<M1C12>_{t,s} - <M1C23>_{t,s,t})", v[5], se[5]},
               {"-beta^4 int k2 (<C12^2>_{t,s} - 2<C12C23>_{s,t,s} + <C12C34>_{t,s,s,t})",
                v[6], se[6]}};
    r.rhs = detail::pick(tb, v, se, 7);
    r.residual = v[8];
    r.residual_se = se[8];
    return r;
}

inline IdentityReport linear_lemma_check(const InteractionModel& m, const DisorderMeasure& meas,
                                         double beta, const CheckOptions& o = {}) {
    QuenchedTable tb(m, meas, PathKind::Linear, o.n_param_nodes, beta, o.enum_cap, o.n_threads);
    std::vector<double> v, se;
    tb.evaluate(lemma3_stats, v, se);
    IdentityReport r;
    r.name = "variance-linear-path";
    r.method = tb.ensemble().method;
    r.has_mean = true;
    r.mean_direct = detail::pick(tb, v, se, 0);
    r.mean_formula = detail::pick(tb, v, se, 1);
    r.lhs = detail::pick(tb, v, se, 2);
    r.terms = {{"beta^2 int <C12>_{t,s}", v[3], se[3]},
               {"beta^2 int (<M1M2>_{t,s} - <M>_t<M>_s)", v[4], se[4]},
               {"-2beta^3 int t (<M1C12>_{t,s} - <M1C23>_{t,t,s} - <M1C23>_{s,t,t} "
                "+ <C12>_{t,t}<M>_s)", v[5], se[5]},
               {"beta^4 int ts (<C12C34>_{t,t,s,s} - <C12>_{t,t}<C12>_{s,s})", v[6], se[6]},
               {"-4beta^4 int t^2 (<C12C23>_{t,t,s} - <C12C34>_{t,t,s,t})", v[7], se[7]},
               {"beta^4 int ts (<C12^2>_{t,s} - 2<C12C23>_{t,s,t} + <C12C34>_{t,s,s,t})",
                v[8], se[8]}};
    r.rhs = detail::pick(tb, v, se, 9);
    r.residual = v[10];
    r.residual_se = se[10];
    return r;
}

// ---- identity functionals (the objects that must vanish with volume) ------

enum class Theorem1Part { Centered, Full };

// stats: {value}; everything normalized per subregion site
inline std::vector<double> theorem1_centered_stats(const QuenchedTable& tb,
                                                   const std::vector<int>& idx,
                                                   const std::vector<double>& w) {
    detail::PairGrid g(tb.params());
    const auto& d2 = tb.d2();
    double norm = (double)tb.model().region_size() * tb.model().region_size();
    KahanSum acc;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        double s = 0;
        for (int i = 0; i < g.np; ++i)
            for (int j = 0; j < g.np; ++j) {
                std::size_t p = (std::size_t)i * g.np + j;
                double rc = rp_c12(M[i], M[j], d2);
                s += g.w2[p] * g.k2[p] *
                     (rp_c12sq(M[i], M[j], d2) - 2.0 * rp_c12c23(M[i], M[j], M[i], d2) +
                      rc * rc);
            }
        acc.add(w[n] * s / norm);
    }
    return {acc.value()};
}

inline std::vector<double> theorem1_full_stats(const QuenchedTable& tb,
                                               const std::vector<int>& idx,
                                               const std::vector<double>& w) {
    detail::PairGrid g(tb.params());
    const auto& d2 = tb.d2();
    double b = tb.beta();
    double norm = (double)tb.model().region_size() * tb.model().region_size();
    std::vector<double> avM, avCtt;
    detail::param_averages(tb, idx, w, avM, avCtt);
    KahanSum acc;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        double s = 0;
        for (int i = 0; i < g.np; ++i)
            for (int j = 0; j < g.np; ++j) {
                std::size_t p = (std::size_t)i * g.np + j;
                double rc = rp_c12(M[i], M[j], d2);
                s += g.w2[p] *
                     (b * b * g.h1[p] * M[i].b1 * M[j].b1 -
                      2.0 * b * b * b * g.h2[p] *
                          (rp_m1c12(M[i], M[j], d2) - rp_m1c23(M[i], M[j], M[i], d2)) -
                      b * b * b * b * g.k2[p] *
                          (rp_c12sq(M[i], M[j], d2) -
                           2.0 * rp_c12c23(M[j], M[i], M[j], d2) + rc * rc));
            }
        acc.add(w[n] * s / norm);
    }
    double disc = 0;
    for (int i = 0; i < g.np; ++i)
        for (int j = 0; j < g.np; ++j) {
            std::size_t p = (std::size_t)i * g.np + j;
            disc += g.w2[p] * g.h1[p] * avM[i] * avM[j];
        }
    return {acc.value() - b * b * disc / norm};
}

// the six-block linear-path functional without the volume-suppressed
// beta^2 <c12> block; stats: {value}
inline std::vector<double> theorem3_full_stats(const QuenchedTable& tb,
                                               const std::vector<int>& idx,
                                               const std::vector<double>& w) {
    std::vector<double> v = lemma3_stats(tb, idx, w);
    double norm = (double)tb.model().region_size() * tb.model().region_size();
    // terms t2..t6 at stats slots 4..8
    return {(v[4] + v[5] + v[6] + v[7] + v[8]) / norm};
}

inline QuenchedEstimate theorem1_functional(const InteractionModel& m,
                                            const DisorderMeasure& meas, double beta,
                                            Theorem1Part part, const CheckOptions& o = {}) {
    PathKind path = part == Theorem1Part::Centered ? PathKind::TrigF0 : PathKind::TrigF;
    QuenchedTable tb(m, meas, path, o.n_param_nodes, beta, o.enum_cap, o.n_threads);
    std::vector<double> v, se;
    if (part == Theorem1Part::Centered)
        tb.evaluate(theorem1_centered_stats, v, se);
    else
        tb.evaluate(theorem1_full_stats, v, se);
    return detail::pick(tb, v, se, 0);
}

inline QuenchedEstimate theorem3_linear_functional(const InteractionModel& m,
                                                   const DisorderMeasure& meas, double beta,
                                                   const CheckOptions& o = {}) {
    QuenchedTable tb(m, meas, PathKind::Linear, o.n_param_nodes, beta, o.enum_cap, o.n_threads);
    std::vector<double> v, se;
    tb.evaluate(theorem3_full_stats, v, se);
    return detail::pick(tb, v, se, 0);
}

/// Replicon combination integrated along the linear path with the smooth
/// positive kernel sin^2(t-s). The path's native weight t*s is even-odd
/// degenerate on gauge-even families (bond-only chains), where it integrates
/// to exactly zero, so the decay scans use this kernel instead.
inline QuenchedEstimate linear_replicon_functional(const InteractionModel& m,
                                                   const DisorderMeasure& meas, double beta,
                                                   const CheckOptions& o = {}) {
    QuenchedTable tb(m, meas, PathKind::Linear, o.n_param_nodes, beta, o.enum_cap, o.n_threads);
    std::vector<double> v, se;
    tb.evaluate(theorem1_centered_stats, v, se);
    return detail::pick(tb, v, se, 0);
}

// the replicon combination with full-flip states, subscripts (s,t,s)
inline std::vector<double> replicon_full_stats(const QuenchedTable& tb,
                                               const std::vector<int>& idx,
                                               const std::vector<double>& w) {
    detail::PairGrid g(tb.params());
    const auto& d2 = tb.d2();
    double norm = (double)tb.model().region_size() * tb.model().region_size();
    KahanSum acc;
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& M = tb.mom(idx[n]);
        double s = 0;
        for (int i = 0; i < g.np; ++i)
            for (int j = 0; j < g.np; ++j) {
                std::size_t p = (std::size_t)i * g.np + j;
                double rc = rp_c12(M[i], M[j], d2);
                s += g.w2[p] * g.k2[p] *
                     (rp_c12sq(M[i], M[j], d2) - 2.0 * rp_c12c23(M[j], M[i], M[j], d2) +
                      rc * rc);
            }
        acc.add(w[n] * s / norm);
    }
    return {acc.value()};
}

struct MuAverageResult {
    QuenchedEstimate value;      // mu-integrated replicon functional
    QuenchedEstimate mag_fluct;  // mu-integrated <m^2>_t - <m>_t^2 at mid parameter
};

/// Integral over a mean-strength interval of the replicon functional with
/// full-flip states; the model family maps mu to a model with means mu*mu'_X.
inline MuAverageResult theorem2_mu_average(
    const std::function<InteractionModel(double)>& family, const DisorderMeasure& meas,
    double beta, double mu1, double mu2, int n_mu, const CheckOptions& o = {}) {
    if (n_mu < 1) throw std::invalid_argument("theorem2: n_mu < 1");
    MuAverageResult out;
    if (mu1 == mu2) {  // degenerate interval
        out.value.method = "degenerate-interval";
        out.mag_fluct.method = "degenerate-interval";
        return out;
    }
    QuadratureRule mr = gauss_legendre(n_mu, mu1, mu2);
    KahanSum val, mf;
    double val_se2 = 0, mf_se2 = 0;
    bool exact = true;
    int nd = 0;
    std::string method;
    for (int k = 0; k < n_mu; ++k) {
        InteractionModel m = family(mr.nodes[k]);
        QuenchedTable tb(m, meas, PathKind::TrigF, o.n_param_nodes, beta, o.enum_cap,
                         o.n_threads);
        std::vector<double> v, se;
        tb.evaluate(replicon_full_stats, v, se);
        val.add(mr.weights[k] * v[0]);
        val_se2 += mr.weights[k] * mr.weights[k] * se[0] * se[0];
        // magnetization fluctuation at the middle parameter node
        int mid = (int)tb.params().size() / 2;
        auto magf = [mid](const QuenchedTable& t, const std::vector<int>& idx,
                          const std::vector<double>& w) -> std::vector<double> {
            double M2 = 0, M1 = 0;
            for (std::size_t n = 0; n < idx.size(); ++n) {
                const auto& g = t.mom(idx[n])[mid];
                M2 += w[n] * g.b2;
                M1 += w[n] * g.b1;
            }
            double r = (double)t.model().region_size();
            return {(M2 - M1 * M1) / (r * r)};
        };
        std::vector<double> v2, se2;
        tb.evaluate(magf, v2, se2);
        mf.add(mr.weights[k] * v2[0]);
        mf_se2 += mr.weights[k] * mr.weights[k] * se2[0] * se2[0];
        exact = exact && tb.ensemble().exact;
        nd = (int)tb.ensemble().size();
        method = tb.ensemble().method;
    }
    out.value.value = val.value();
    out.value.std_error = std::sqrt(val_se2);
    out.value.exact = exact;
    out.value.n_draws = nd;
    out.value.method = method + " x mu-gauss-legendre(" + std::to_string(n_mu) + ")";
    out.mag_fluct.value = mf.value();
    out.mag_fluct.std_error = std::sqrt(mf_se2);
    out.mag_fluct.exact = exact;
    out.mag_fluct.n_draws = nd;
    out.mag_fluct.method = out.value.method;
    return out;
}

// ---- replicon polynomial, two equivalent evaluations -----------------------

struct RepliconResult {
    double value_a;  // replica-product form
    double value_b;  // truncated-correlation double sum
    double residual;
};

inline RepliconResult replicon_two_ways(const InteractionModel& m,
                                        const CouplingAssignment& c, double beta, double t,
                                        double s, int enum_cap = 20) {
    GibbsEngine eng(m, enum_cap);
    std::vector<double> eff;
    effective_couplings(m, c, PathKind::TrigF0, t, eff);
    GibbsMoments gt = eng.moments(eff, beta);
    effective_couplings(m, c, PathKind::TrigF0, s, eff);
    GibbsMoments gs = eng.moments(eff, beta);
    std::vector<double> d2;
    for (int k : m.interior()) d2.push_back(m.interactions()[k].delta2);
    double norm = (double)m.region_size() * m.region_size();
    // pointwise in (t,s) the cross term appears in both parameter orders;
    // the familiar -2<C12C23> shape is recovered after symmetric integration
    double a = (rp_c12sq(gt, gs, d2) - rp_c12c23(gs, gt, gs, d2) -
                rp_c12c23(gt, gs, gt, d2) +
                rp_c12(gt, gs, d2) * rp_c12(gs, gt, d2)) /
               norm;
    double b = 0;
    int mi = (int)d2.size();
    for (int x = 0; x < mi; ++x)
        for (int y = 0; y < mi; ++y)
            b += d2[x] * d2[y] * (gt.s2v(x, y) - gt.s1[x] * gt.s1[y]) *
                 (gs.s2v(x, y) - gs.s1[x] * gs.s1[y]);
    b /= norm;
    return {a, b, std::abs(a - b)};
}

// ---- volume scans ----------------------------------------------------------

enum class ScanFunctional { Centered, Full, MuAveraged, Linear };

inline std::string scan_functional_name(ScanFunctional f) {
    switch (f) {
        case ScanFunctional::Centered: return "centered";
        case ScanFunctional::Full: return "full";
        case ScanFunctional::MuAveraged: return "mu-averaged";
        case ScanFunctional::Linear: return "linear";
    }
    return "?";
}

struct ScanPoint {
    int index = 0;  // family index (e.g. chain length)
    int n_sites = 0;
    int region_size = 0;
    double value = 0.0;
    double std_error = 0.0;
};

struct ScanSeries {
    std::string functional;
    std::vector<ScanPoint> points;
    double kendall_tau = 0.0;    // trend of |value| vs index
    double decay_factor = 0.0;   // |first| / |last|
    bool statistically_zero = false;
    bool degenerate = false;     // all values exactly zero: no trend defined
};

inline double kendall_tau_abs(const std::vector<ScanPoint>& pts) {
    int n = (int)pts.size(), s = 0, npairs = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double a = std::abs(pts[i].value), b = std::abs(pts[j].value);
            ++npairs;
            if (b > a) ++s;
            else if (b < a) --s;
        }
    return npairs ? (double)s / npairs : 0.0;
}

struct ScanOptions {
    int n_param_nodes = 8;
    int enum_cap = 20;
    int n_threads = 1;
    double mu1 = 0.0, mu2 = 0.6;  // mean-strength interval for the mu-averaged scan
    int n_mu = 3;
    // family(index, mu) used for the mu-averaged functional only
    std::function<InteractionModel(int, double)> mu_family;
};

inline ScanSeries volume_scan(ScanFunctional f,
                              const std::function<InteractionModel(int)>& family,
                              const std::vector<int>& indices,
                              const std::function<DisorderMeasure(int)>& measure_for,
                              double beta, const ScanOptions& o = {}) {
    ScanSeries s;
    s.functional = scan_functional_name(f);
    CheckOptions co{o.n_param_nodes, o.enum_cap, o.n_threads};
    for (int L : indices) {
        QuenchedEstimate q;
        InteractionModel m = family(L);
        switch (f) {
            case ScanFunctional::Centered:
                q = theorem1_functional(m, measure_for(L), beta, Theorem1Part::Centered, co);
                break;
            case ScanFunctional::Full:
                q = theorem1_functional(m, measure_for(L), beta, Theorem1Part::Full, co);
                break;
            case ScanFunctional::Linear:
                q = linear_replicon_functional(m, measure_for(L), beta, co);
                break;
            case ScanFunctional::MuAveraged: {
                if (!o.mu_family)
                    throw std::invalid_argument("volume_scan: mu-averaged scan needs mu_family");
                auto fam = [&](double mu) { return o.mu_family(L, mu); };
                q = theorem2_mu_average(fam, measure_for(L), beta, o.mu1, o.mu2, o.n_mu, co)
                        .value;
                break;
            }
        }
        s.points.push_back({L, m.n_sites(), m.region_size(), q.value, q.std_error});
    }
    bool allzero = true, allstat = true;
    for (const auto& p : s.points) {
        if (p.value != 0.0) allzero = false;
        if (std::abs(p.value) >= 3.0 * p.std_error) allstat = false;
    }
    s.degenerate = allzero;
    s.statistically_zero = allstat && !s.points.empty();
    s.kendall_tau = s.degenerate ? 0.0 : kendall_tau_abs(s.points);
    double first = std::abs(s.points.front().value), last = std::abs(s.points.back().value);
    s.decay_factor = last > 0 ? first / last : (first > 0 ? 1e300 : 0.0);
    return s;
}

}  // namespace spinflip
