#pragma once
// Finite-volume interaction models H(sigma) = -sum_X J_X sigma_X over a spin
// set with a distinguished subregion. Interactions are classified as interior
// (X inside the subregion) or remainder; the flip operators act on the
// interior family only.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinflip {

struct Interaction {
    std::vector<int> sites;  // nonempty, distinct site indices
    double mu = 0.0;         // coupling mean
    double delta2 = 0.0;     // coupling variance
};

struct LatticeInfo {
    int dim = 0;
    int side = 0;
    bool periodic = false;
};

/// One disorder realization: a J value per interaction plus an independent
/// J-tilde value per interior interaction (indexed by interior slot).
struct CouplingAssignment {
    std::vector<double> j;
    std::vector<double> jt;  // empty when no tilde family was drawn
    bool has_tilde() const { return !jt.empty(); }
};

enum class HamiltonianPart {
    Full,
    Interior,
    Remainder,
    InteriorCentered,       // uses J - mu on interior interactions
    InteriorTildeCentered,  // uses Jt - mu (tilde family)
    BOnly                   // deterministic part -sum mu_X sigma_X over interior
};

class InteractionModel {
public:
    InteractionModel(int n_sites, std::vector<Interaction> interactions,
                     std::vector<int> region, LatticeInfo lattice = {})
        : n_(n_sites), inters_(std::move(interactions)), lattice_(lattice) {
        if (n_ < 1) throw std::invalid_argument("model: need at least one site");
        std::set<std::uint32_t> seen;
        for (auto& it : inters_) {
            if (it.sites.empty()) throw std::invalid_argument("model: empty interaction set");
            if (it.delta2 < 0) throw std::invalid_argument("model: negative variance");
            std::uint32_t m = 0;
            for (int s : it.sites) {
                if (s < 0 || s >= n_) throw std::invalid_argument("model: site out of range");
                if (m & (1u << s)) throw std::invalid_argument("model: repeated site in interaction");
                m |= 1u << s;
            }
            if (!seen.insert(m).second)
                throw std::invalid_argument("model: duplicate interaction set");
            masks_.push_back(m);
        }
        region_mask_ = 0;
        for (int s : region) {
            if (s < 0 || s >= n_) throw std::invalid_argument("model: subregion site outside spin set");
            region_mask_ |= 1u << s;
        }
        region_size_ = std::popcount(region_mask_);
        for (int k = 0; k < (int)inters_.size(); ++k) {
            bool in = (masks_[k] & ~region_mask_) == 0;
            interior_slot_.push_back(in ? (int)interior_.size() : -1);
            (in ? interior_ : remainder_).push_back(k);
        }
    }

    int n_sites() const { return n_; }
    int n_interactions() const { return (int)inters_.size(); }
    const std::vector<Interaction>& interactions() const { return inters_; }
    const std::vector<std::uint32_t>& masks() const { return masks_; }
    const std::vector<int>& interior() const { return interior_; }
    const std::vector<int>& remainder() const { return remainder_; }
    int interior_slot(int k) const { return interior_slot_[k]; }
    bool is_interior(int k) const { return interior_slot_[k] >= 0; }
    std::uint32_t region_mask() const { return region_mask_; }
    int region_size() const { return region_size_; }
    const LatticeInfo& lattice() const { return lattice_; }

    // sigma_X for a configuration given as a bitmask (set bit = spin down)
    static int sigma(std::uint32_t state, std::uint32_t mask) {
        return (std::popcount(state & mask) & 1) ? -1 : 1;
    }
    int sigma_x(std::uint32_t state, int k) const { return sigma(state, masks_[k]); }

    // deterministic parts over the subregion
    double b_part(std::uint32_t state) const {  // B(sigma) = -sum mu_X sigma_X
        double b = 0;
        for (int k : interior_) b -= inters_[k].mu * sigma(state, masks_[k]);
        return b;
    }
    double d_part() const {  // D = sum Delta^2_X
        double d = 0;
        for (int k : interior_) d += inters_[k].delta2;
        return d;
    }
    double c_part(std::uint32_t s, std::uint32_t t) const {  // C(sigma,tau)
        double c = 0;
        for (int k : interior_)
            c += inters_[k].delta2 * sigma(s, masks_[k]) * sigma(t, masks_[k]);
        return c;
    }

    struct Stability {
        double full;      // max of per-site summed |mu| and summed Delta^2 over Lambda
        double interior;  // same restricted to the subregion family, per subregion site
    };
    Stability stability_constant() const {
        double ma = 0, va = 0, mi = 0, vi = 0;
        for (int k = 0; k < n_interactions(); ++k) {
            ma += std::abs(inters_[k].mu);
            va += inters_[k].delta2;
            if (is_interior(k)) {
                mi += std::abs(inters_[k].mu);
                vi += inters_[k].delta2;
            }
        }
        Stability s;
        s.full = std::max(ma / n_, va / n_);
        s.interior = region_size_ ? std::max(mi / region_size_, vi / region_size_) : 0.0;
        return s;
    }

private:
    int n_;
    std::vector<Interaction> inters_;
    LatticeInfo lattice_;
    std::vector<std::uint32_t> masks_;
    std::vector<int> interior_, remainder_, interior_slot_;
    std::uint32_t region_mask_ = 0;
    int region_size_ = 0;
};

inline double hamiltonian_eval(const InteractionModel& m, const CouplingAssignment& c,
                               std::uint32_t state, HamiltonianPart part) {
    const auto& it = m.interactions();
    double e = 0;
    switch (part) {
        case HamiltonianPart::Full:
            for (int k = 0; k < m.n_interactions(); ++k)
                e -= c.j[k] * m.sigma_x(state, k);
            break;
        case HamiltonianPart::Interior:
            for (int k : m.interior()) e -= c.j[k] * m.sigma_x(state, k);
            break;
        case HamiltonianPart::Remainder:
            for (int k : m.remainder()) e -= c.j[k] * m.sigma_x(state, k);
            break;
        case HamiltonianPart::InteriorCentered:
            for (int k : m.interior()) e -= (c.j[k] - it[k].mu) * m.sigma_x(state, k);
            break;
        case HamiltonianPart::InteriorTildeCentered:
            if (!c.has_tilde())
                throw std::invalid_argument("hamiltonian_eval: tilde couplings missing");
            for (int k : m.interior())
                e -= (c.jt[m.interior_slot(k)] - it[k].mu) * m.sigma_x(state, k);
            break;
        case HamiltonianPart::BOnly:
            e = m.b_part(state);
            break;
    }
    return e;
}

/// Flip F: negate interior couplings.
inline CouplingAssignment flip_full(CouplingAssignment c, const InteractionModel& m) {
    for (int k : m.interior()) c.j[k] = -c.j[k];
    return c;
}

/// Flip F0: negate only the centered part, J -> 2 mu - J on the interior.
inline CouplingAssignment flip_centered(CouplingAssignment c, const InteractionModel& m) {
    for (int k : m.interior()) c.j[k] = 2.0 * m.interactions()[k].mu - c.j[k];
    return c;
}

// ---- builders ----------------------------------------------------------

struct ChainOptions {
    int n = 2;
    double bond_mu = 0.0;
    double bond_delta2 = 1.0;
    bool fields = false;
    double field_mu = 0.0;
    double field_delta2 = 0.0;
    bool periodic = false;
    int region_first = -1;          // first k sites; -1 means whole chain
    std::vector<int> region_sites;  // overrides region_first when nonempty
};

inline InteractionModel chain_model(const ChainOptions& o) {
    std::vector<Interaction> is;
    int nb = o.periodic ? o.n : o.n - 1;
    for (int i = 0; i < nb; ++i)
        is.push_back({{i, (i + 1) % o.n}, o.bond_mu, o.bond_delta2});
    if (o.fields)
        for (int i = 0; i < o.n; ++i) is.push_back({{i}, o.field_mu, o.field_delta2});
    std::vector<int> region = o.region_sites;
    if (region.empty()) {
        int k = o.region_first < 0 ? o.n : o.region_first;
        for (int i = 0; i < k; ++i) region.push_back(i);
    }
    LatticeInfo lat{1, o.n, o.periodic};
    return InteractionModel(o.n, std::move(is), std::move(region), lat);
}

struct Ea2dOptions {
    int side = 2;
    double mu = 0.0;
    double delta2 = 1.0;
    bool periodic = true;
    std::vector<int> region_sites;  // empty: whole lattice
};

inline InteractionModel ea2d_model(const Ea2dOptions& o) {
    int L = o.side, n = L * L;
    auto id = [L](int x, int y) { return ((y % L + L) % L) * L + ((x % L + L) % L); };
    std::vector<Interaction> is;
    for (int y = 0; y < L; ++y)
        for (int x = 0; x < L; ++x) {
            if (o.periodic || x + 1 < L) is.push_back({{id(x, y), id(x + 1, y)}, o.mu, o.delta2});
            if (o.periodic || y + 1 < L) is.push_back({{id(x, y), id(x, y + 1)}, o.mu, o.delta2});
        }
    std::vector<int> region = o.region_sites;
    if (region.empty())
        for (int i = 0; i < n; ++i) region.push_back(i);
    LatticeInfo lat{2, L, o.periodic};
    return InteractionModel(n, std::move(is), std::move(region), lat);
}

}  // namespace spinflip
