#pragma once
// Exact Gibbs engine. States are enumerated in Gray-code order so that one
// spin flips per step and the energy is updated in O(interactions at that
// site). A single sweep fills the one-replica moment cache (log Z, omega of
// sigma_X, sigma_X sigma_Y, B, B sigma_X, B^2 over the interior family) from
// which every multi-replica quenched average in the identity checks is
// assembled.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "quadrature.hpp"

namespace spinflip {

struct GibbsMoments {
    double log_z = 0.0;
    int m = 0;                // interior interaction count
    std::vector<double> s1;   // omega(sigma_X)
    std::vector<double> s2;   // omega(sigma_X sigma_Y), row-major m x m
    std::vector<double> bs;   // omega(B sigma_X)
    double b1 = 0.0;          // omega(B)
    double b2 = 0.0;          // omega(B^2)
    double s2v(int a, int b) const { return s2[(std::size_t)a * m + b]; }
};

class GibbsEngine {
public:
    explicit GibbsEngine(const InteractionModel& m, int enum_cap = 20) : m_(&m) {
        if (m.n_sites() > enum_cap)
            throw std::invalid_argument("gibbs: spin count exceeds enumeration cap");
        incidence_.resize(m.n_sites());
        for (int k = 0; k < m.n_interactions(); ++k)
            for (int s : m.interactions()[k].sites) incidence_[s].push_back(k);
        for (int k : m.interior()) mu_int_.push_back(m.interactions()[k].mu);
    }

    const InteractionModel& model() const { return *m_; }

    double log_partition(const std::vector<double>& c, double beta) const {
        double emin = min_energy(c);
        KahanSum z;
        enumerate(c, [&](double e, const signed char*) { z.add(std::exp(-beta * (e - emin))); });
        return -beta * emin + std::log(z.value());
    }

    GibbsMoments moments(const std::vector<double>& c, double beta) const {
        const int m = (int)m_->interior().size();
        double emin = min_energy(c);
        KahanSum z, b1, b2;
        std::vector<KahanSum> s1(m), bs(m), s2((std::size_t)m * (m + 1) / 2);
        enumerate(c, [&](double e, const signed char* sig) {
            double w = std::exp(-beta * (e - emin));
            z.add(w);
            double b = 0;
            for (int r = 0; r < m; ++r) b -= mu_int_[r] * sig[r];
            b1.add(w * b);
            b2.add(w * b * b);
            std::size_t p = 0;
            for (int a = 0; a < m; ++a) {
                double wa = w * sig[a];
                s1[a].add(wa);
                bs[a].add(wa * b);
                for (int bidx = a; bidx < m; ++bidx, ++p) s2[p].add(wa * sig[bidx]);
            }
        });
        GibbsMoments out;
        out.m = m;
        double Z = z.value();
        out.log_z = -beta * emin + std::log(Z);
        out.s1.resize(m);
        out.bs.resize(m);
        out.s2.resize((std::size_t)m * m);
        out.b1 = b1.value() / Z;
        out.b2 = b2.value() / Z;
        std::size_t p = 0;
        for (int a = 0; a < m; ++a) {
            out.s1[a] = s1[a].value() / Z;
            out.bs[a] = bs[a].value() / Z;
            for (int b = a; b < m; ++b, ++p) {
                double v = s2[p].value() / Z;
                out.s2[(std::size_t)a * m + b] = v;
                out.s2[(std::size_t)b * m + a] = v;
            }
        }
        return out;
    }

private:
    double min_energy(const std::vector<double>& c) const {
        double emin = 1e300;
        enumerate(c, [&](double e, const signed char*) {
            if (e < emin) emin = e;
        });
        return emin;
    }

    // visit(energy, interior sigma values) for all 2^N states, Gray order
    template <class F>
    void enumerate(const std::vector<double>& c, F&& visit) const {
        const int nk = m_->n_interactions();
        if ((int)c.size() != nk) throw std::invalid_argument("gibbs: coupling size mismatch");
        std::vector<signed char> sig(nk, 1);
        std::vector<signed char> sigI(m_->interior().size(), 1);
        double e = 0;
        for (int k = 0; k < nk; ++k) e -= c[k];
        visit(e, sigI.data());
        const std::uint64_t total = 1ull << m_->n_sites();
        for (std::uint64_t k = 1; k < total; ++k) {
            int bit = std::countr_zero(k);
            for (int j : incidence_[bit]) {
                e += 2.0 * c[j] * sig[j];
                sig[j] = -sig[j];
                int slot = m_->interior_slot(j);
                if (slot >= 0) sigI[slot] = sig[j];
            }
            visit(e, sigI.data());
        }
    }

    const InteractionModel* m_;
    std::vector<std::vector<int>> incidence_;
    std::vector<double> mu_int_;
};

// ---- fast replica-product contractions ----------------------------------
// All sums run over the interior interaction family with weights Delta^2;
// positional parameters are carried by which moment set each replica uses.

inline double rp_c12(const GibbsMoments& a, const GibbsMoments& b,
                     const std::vector<double>& d2) {
    double v = 0;
    for (int x = 0; x < a.m; ++x) v += d2[x] * a.s1[x] * b.s1[x];
    return v;
}

inline double rp_c12sq(const GibbsMoments& a, const GibbsMoments& b,
                       const std::vector<double>& d2) {
    double v = 0;
    for (int x = 0; x < a.m; ++x)
        for (int y = 0; y < a.m; ++y) v += d2[x] * d2[y] * a.s2v(x, y) * b.s2v(x, y);
    return v;
}

// omega_1(sigma_X) omega_2(sigma_X sigma_Y) omega_3(sigma_Y), replica 2 shared
inline double rp_c12c23(const GibbsMoments& r1, const GibbsMoments& r2,
                        const GibbsMoments& r3, const std::vector<double>& d2) {
    double v = 0;
    for (int x = 0; x < r1.m; ++x) {
        double inner = 0;
        for (int y = 0; y < r1.m; ++y) inner += d2[y] * r2.s2v(x, y) * r3.s1[y];
        v += d2[x] * r1.s1[x] * inner;
    }
    return v;
}

inline double rp_c12c34(const GibbsMoments& r1, const GibbsMoments& r2,
                        const GibbsMoments& r3, const GibbsMoments& r4,
                        const std::vector<double>& d2) {
    return rp_c12(r1, r2, d2) * rp_c12(r3, r4, d2);
}

// omega_1(B sigma_X) omega_2(sigma_X)
inline double rp_m1c12(const GibbsMoments& a, const GibbsMoments& b,
                       const std::vector<double>& d2) {
    double v = 0;
    for (int x = 0; x < a.m; ++x) v += d2[x] * a.bs[x] * b.s1[x];
    return v;
}

inline double rp_m1c23(const GibbsMoments& r1, const GibbsMoments& r2,
                       const GibbsMoments& r3, const std::vector<double>& d2) {
    return r1.b1 * rp_c12(r2, r3, d2);
}

}  // namespace spinflip
