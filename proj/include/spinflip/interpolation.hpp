#pragma once
// Interpolation paths between a Hamiltonian and its flipped version, the
// trigonometric kernels of the variance formulas, and the pressure-difference
// random variables X (flip F) and X0 (flip F0).

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "disorder.hpp"
#include "gibbs.hpp"
#include "model.hpp"

namespace spinflip {

enum class PathKind { TrigF, TrigF0, Linear };

inline std::string path_name(PathKind p) {
    switch (p) {
        case PathKind::TrigF: return "trig-full";
        case PathKind::TrigF0: return "trig-centered";
        case PathKind::Linear: return "linear";
    }
    return "?";
}

inline std::pair<double, double> path_domain(PathKind p) {
    if (p == PathKind::Linear) return {-1.0, 1.0};
    return {0.0, M_PI};
}

// endpoint parameters: pressure difference is P(start) - P(end)
inline std::pair<double, double> path_endpoints(PathKind p) {
    if (p == PathKind::Linear) return {1.0, -1.0};
    return {0.0, M_PI};
}

/// Effective coupling vector of the interpolated Hamiltonian at parameter t.
/// Remainder couplings are untouched on every path; interior couplings are
///   trig-full:      cos t J + sin t Jt
///   trig-centered:  cos t (J - mu) + sin t (Jt - mu) + mu
///   linear:         t J
inline void effective_couplings(const InteractionModel& m, const CouplingAssignment& c,
                                PathKind path, double t, std::vector<double>& out) {
    auto [lo, hi] = path_domain(path);
    if (t < lo - 1e-12 || t > hi + 1e-12)
        throw std::invalid_argument("interpolation: parameter outside path domain");
    if (path != PathKind::Linear && !c.has_tilde() && !m.interior().empty())
        throw std::invalid_argument("interpolation: trig path needs tilde couplings");
    out = c.j;
    double ct = std::cos(t), st = std::sin(t);
    for (std::size_t r = 0; r < m.interior().size(); ++r) {
        int k = m.interior()[r];
        double mu = m.interactions()[k].mu;
        switch (path) {
            case PathKind::TrigF: out[k] = ct * c.j[k] + st * c.jt[r]; break;
            case PathKind::TrigF0:
                out[k] = ct * (c.j[k] - mu) + st * (c.jt[r] - mu) + mu;
                break;
            case PathKind::Linear: out[k] = t * c.j[k]; break;
        }
    }
}

inline double interp_hamiltonian(PathKind path, double t, const InteractionModel& m,
                                 const CouplingAssignment& c, std::uint32_t state) {
    std::vector<double> eff;
    effective_couplings(m, c, path, t, eff);
    double e = 0;
    for (int k = 0; k < m.n_interactions(); ++k) e -= eff[k] * m.sigma_x(state, k);
    return e;
}

inline double pressure(const GibbsEngine& eng, const CouplingAssignment& c, PathKind path,
                       double t, double beta) {
    std::vector<double> eff;
    effective_couplings(eng.model(), c, path, t, eff);
    return eng.log_partition(eff, beta);
}

/// X = P - P^(-): pressure at the path start minus pressure at the end. The
/// endpoints reproduce the unflipped/flipped Hamiltonians exactly, so this
/// equals the direct two-pressure evaluation with flipped couplings.
inline double pressure_difference(PathKind path, const GibbsEngine& eng,
                                  const CouplingAssignment& c, double beta) {
    auto [t0, t1] = path_endpoints(path);
    return pressure(eng, c, path, t0, beta) - pressure(eng, c, path, t1, beta);
}

// the same random variables without reference to a path
inline double x_full(const GibbsEngine& eng, const CouplingAssignment& c, double beta) {
    return eng.log_partition(c.j, beta) -
           eng.log_partition(flip_full(c, eng.model()).j, beta);
}
inline double x_centered(const GibbsEngine& eng, const CouplingAssignment& c, double beta) {
    return eng.log_partition(c.j, beta) -
           eng.log_partition(flip_centered(c, eng.model()).j, beta);
}

// ---- kernels -------------------------------------------------------------

enum class Kernel { K1, K2, H1, H2 };

inline double kernel_eval(Kernel k, double t, double s) {
    switch (k) {
        case Kernel::K1: return std::cos(t - s);
        case Kernel::K2: { double x = std::sin(t - s); return x * x; }
        case Kernel::H1: return (std::cos(t) - std::sin(t)) * (std::cos(s) - std::sin(s));
        case Kernel::H2: return std::sin(t - s) * (std::cos(t) - std::sin(t));
    }
    throw std::invalid_argument("kernel_eval: unknown kernel");
}

inline Kernel kernel_by_name(const std::string& n) {
    if (n == "k1") return Kernel::K1;
    if (n == "k2") return Kernel::K2;
    if (n == "h1") return Kernel::H1;
    if (n == "h2") return Kernel::H2;
    throw std::invalid_argument("kernel_eval: unknown kernel name " + n);
}

}  // namespace spinflip
