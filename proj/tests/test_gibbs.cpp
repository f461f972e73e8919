#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "spinflip/disorder.hpp"
#include "spinflip/gibbs.hpp"
#include "test_models.hpp"

using namespace spinflip;

namespace {

// Independent brute-force oracle: no Gray code, no energy shift tricks,
// long-double accumulation over all states.
struct BruteMoments {
    long double log_z;
    std::vector<long double> s1, bs;
    std::vector<std::vector<long double>> s2;
    long double b1, b2;
};

BruteMoments brute(const InteractionModel& m, const std::vector<double>& c, double beta) {
    const int n = m.n_sites(), mi = (int)m.interior().size();
    BruteMoments o;
    o.s1.assign(mi, 0);
    o.bs.assign(mi, 0);
    o.s2.assign(mi, std::vector<long double>(mi, 0));
    o.b1 = o.b2 = 0;
    long double z = 0;
    for (std::uint32_t st = 0; st < (1u << n); ++st) {
        long double e = 0;
        for (int k = 0; k < m.n_interactions(); ++k)
            e -= (long double)c[k] * m.sigma_x(st, k);
        long double w = std::exp(-(long double)beta * e);
        z += w;
        long double b = 0;
        for (int r = 0; r < mi; ++r)
            b -= (long double)m.interactions()[m.interior()[r]].mu *
                 m.sigma_x(st, m.interior()[r]);
        o.b1 += w * b;
        o.b2 += w * b * b;
        for (int a = 0; a < mi; ++a) {
            int sa = m.sigma_x(st, m.interior()[a]);
            o.s1[a] += w * sa;
            o.bs[a] += w * sa * b;
            for (int bb = 0; bb < mi; ++bb)
                o.s2[a][bb] += w * sa * m.sigma_x(st, m.interior()[bb]);
        }
    }
    o.log_z = std::log(z);
    o.b1 /= z;
    o.b2 /= z;
    for (int a = 0; a < mi; ++a) {
        o.s1[a] /= z;
        o.bs[a] /= z;
        for (int bb = 0; bb < mi; ++bb) o.s2[a][bb] /= z;
    }
    return o;
}

}  // namespace

TEST_CASE("single spin: log Z = ln(2 cosh(beta J)) and omega = tanh(beta J)") {
    InteractionModel m = testmodels::single_spin();
    GibbsEngine eng(m);
    for (double j : {-1.3, 0.0, 0.42, 2.5}) {
        for (double beta : {0.25, 1.0}) {
            REQUIRE(eng.log_partition({j}, beta) ==
                    Catch::Approx(std::log(2.0 * std::cosh(beta * j))).margin(1e-14));
            GibbsMoments g = eng.moments({j}, beta);
            REQUIRE(g.s1[0] == Catch::Approx(std::tanh(beta * j)).margin(1e-14));
        }
    }
}

TEST_CASE("moments match the brute-force oracle") {
    for (auto mk : {testmodels::two_spin_fields(), testmodels::chain3(),
                    testmodels::chain3_all(0.2, 0.7)}) {
        GibbsEngine eng(mk);
        std::vector<double> c;
        for (int k = 0; k < mk.n_interactions(); ++k) c.push_back(0.7 - 0.5 * k + 0.13 * k * k);
        for (double beta : {0.3, 1.1}) {
            BruteMoments ref = brute(mk, c, beta);
            GibbsMoments g = eng.moments(c, beta);
            REQUIRE(eng.log_partition(c, beta) ==
                    Catch::Approx((double)ref.log_z).margin(1e-12));
            REQUIRE(g.log_z == Catch::Approx((double)ref.log_z).margin(1e-12));
            REQUIRE(g.b1 == Catch::Approx((double)ref.b1).margin(1e-13));
            REQUIRE(g.b2 == Catch::Approx((double)ref.b2).margin(1e-13));
            for (int a = 0; a < g.m; ++a) {
                REQUIRE(g.s1[a] == Catch::Approx((double)ref.s1[a]).margin(1e-13));
                REQUIRE(g.bs[a] == Catch::Approx((double)ref.bs[a]).margin(1e-13));
                for (int b = 0; b < g.m; ++b)
                    REQUIRE(g.s2v(a, b) == Catch::Approx((double)ref.s2[a][b]).margin(1e-13));
            }
        }
    }
}

TEST_CASE("pair moments are symmetric with unit diagonal") {
    InteractionModel m = testmodels::chain3_all();
    GibbsEngine eng(m);
    GibbsMoments g = eng.moments({0.4, -0.8}, 0.9);
    REQUIRE(g.m == 2);
    for (int a = 0; a < g.m; ++a) {
        REQUIRE(g.s2v(a, a) == Catch::Approx(1.0).margin(1e-14));
        for (int b = 0; b < g.m; ++b) REQUIRE(g.s2v(a, b) == g.s2v(b, a));
    }
}

TEST_CASE("replica contractions agree with direct sums") {
    InteractionModel m = testmodels::chain3_all(0.3, 0.8);
    GibbsEngine eng(m);
    GibbsMoments ga = eng.moments({0.5, -0.2}, 0.7);
    GibbsMoments gb = eng.moments({-0.1, 0.9}, 0.7);
    std::vector<double> d2;
    for (int k : m.interior()) d2.push_back(m.interactions()[k].delta2);

    double c12 = 0, c12sq = 0, c12c23 = 0, m1c12 = 0;
    for (int x = 0; x < ga.m; ++x) {
        c12 += d2[x] * ga.s1[x] * gb.s1[x];
        m1c12 += d2[x] * ga.bs[x] * gb.s1[x];
        for (int y = 0; y < ga.m; ++y) {
            c12sq += d2[x] * d2[y] * ga.s2v(x, y) * gb.s2v(x, y);
            c12c23 += d2[x] * d2[y] * ga.s1[x] * gb.s2v(x, y) * ga.s1[y];
        }
    }
    REQUIRE(rp_c12(ga, gb, d2) == Catch::Approx(c12).margin(1e-14));
    REQUIRE(rp_c12sq(ga, gb, d2) == Catch::Approx(c12sq).margin(1e-14));
    REQUIRE(rp_c12c23(ga, gb, ga, d2) == Catch::Approx(c12c23).margin(1e-14));
    REQUIRE(rp_m1c12(ga, gb, d2) == Catch::Approx(m1c12).margin(1e-14));
    REQUIRE(rp_c12c34(ga, gb, ga, gb, d2) == Catch::Approx(c12 * c12).margin(1e-14));
    REQUIRE(rp_m1c23(ga, gb, gb, d2) ==
            Catch::Approx(ga.b1 * rp_c12(gb, gb, d2)).margin(1e-14));
}

TEST_CASE("enumeration cap and size mismatches throw") {
    ChainOptions o;
    o.n = 6;
    InteractionModel m = chain_model(o);
    REQUIRE_THROWS_AS(GibbsEngine(m, /*enum_cap=*/4), std::invalid_argument);
    GibbsEngine eng(m);
    REQUIRE_THROWS_AS(eng.log_partition({1.0}, 0.5), std::invalid_argument);
}
