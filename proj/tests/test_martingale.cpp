#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "spinflip/martingale.hpp"
#include "test_models.hpp"

using namespace spinflip;

TEST_CASE("martingale differences are orthogonal and decompose the variance") {
    InteractionModel m = testmodels::two_spin_fields();
    DisorderMeasure meas = DisorderMeasure::exact(16);
    for (FlipKind flip : {FlipKind::Centered, FlipKind::Full}) {
        MartingaleDecomposition d = decompose(m, meas, 0.7, flip);
        REQUIRE(d.n_couplings == 3);
        REQUIRE(d.interior_count == 1);
        for (int k = 0; k < d.n_couplings; ++k)
            for (int j = 0; j < d.n_couplings; ++j)
                if (j != k) REQUIRE(std::abs(d.cross[k][j]) < 1e-12);
        REQUIRE(d.sum_psi_sq == Catch::Approx(d.variance).margin(1e-12));
        REQUIRE(d.telescoping_residual < 1e-12);
        REQUIRE(d.a_sup[d.n_couplings] == Catch::Approx(std::abs(d.mean)).margin(1e-15));
    }
}

TEST_CASE("centered flip: averaging over the interior couplings kills X0") {
    InteractionModel m = testmodels::two_spin_fields();
    MartingaleDecomposition d =
        decompose(m, DisorderMeasure::exact(16), 0.7, FlipKind::Centered);
    TailReport t = tail_vanishing_check(d);
    REQUIRE(t.vanishes);
    REQUIRE(t.max_tail < 1e-12);
    REQUIRE(std::abs(d.mean) < 1e-12);
    // only the interior coupling carries variance
    for (int k = d.interior_count; k < d.n_couplings; ++k)
        REQUIRE(d.psi_sq[k] < 1e-14);
    REQUIRE(d.psi_sq[0] == Catch::Approx(d.variance).margin(1e-13));
}

TEST_CASE("full flip with nonzero means: the tail survives") {
    InteractionModel m = testmodels::two_spin_fields();
    MartingaleDecomposition d =
        decompose(m, DisorderMeasure::exact(16), 0.7, FlipKind::Full);
    TailReport t = tail_vanishing_check(d);
    REQUIRE_FALSE(t.vanishes);
    REQUIRE(t.max_tail > 1e-4);
    REQUIRE(std::abs(d.mean) > 1e-4);
}

TEST_CASE("bond-only chain with the whole volume as subregion is gauge degenerate") {
    InteractionModel m = testmodels::chain3_all(0.3, 1.0);
    MartingaleDecomposition df =
        decompose(m, DisorderMeasure::exact(12), 0.8, FlipKind::Full);
    // flipping all bonds is absorbed by a spin gauge transformation: X = 0
    REQUIRE(df.variance < 1e-14);
    REQUIRE(std::abs(df.mean) < 1e-14);
    MartingaleDecomposition d0 =
        decompose(m, DisorderMeasure::exact(12), 0.8, FlipKind::Centered);
    REQUIRE(d0.variance > 1e-3);  // the centered flip is not a gauge move
    REQUIRE(tail_vanishing_check(d0).vanishes);
}

TEST_CASE("ordering puts interior couplings first, sorted by site mask") {
    InteractionModel m(3, {{{1, 2}, 0.1, 1.0}, {{0}, 0.2, 1.0}, {{0, 1}, 0.3, 1.0}},
                       {0, 1});
    MartingaleDecomposition d =
        decompose(m, DisorderMeasure::exact(6), 0.5, FlipKind::Centered);
    REQUIRE(d.interior_count == 2);
    // masks: field {0} = 0b001 < bond {0,1} = 0b011; remainder bond {1,2} last
    REQUIRE(d.ordering == std::vector<int>{1, 2, 0});
}

TEST_CASE("self-averaging bound") {
    ChainOptions o;
    o.n = 4;
    o.region_first = 2;
    InteractionModel m = chain_model(o);  // 3 centered unit bonds, cbar = 3/4
    double beta = 0.5;
    MartingaleDecomposition d =
        decompose(m, DisorderMeasure::exact(12), beta, FlipKind::Centered);
    BoundReport b = bound_check(m, beta, d.variance, FlipKind::Centered);
    REQUIRE(b.cbar == Catch::Approx(0.75));
    REQUIRE(b.r0 == Catch::Approx(0.25 * 0.75 + (22.0 / 3.0) * 0.0625 * 0.5625));
    REQUIRE(b.bound == Catch::Approx(b.r0 * 2));
    REQUIRE(b.holds);
    REQUIRE(b.variance < b.bound);
}

TEST_CASE("partial averages need quadrature mode and bounded dimension") {
    InteractionModel m = testmodels::two_spin_fields();
    REQUIRE_THROWS_AS(decompose(m, DisorderMeasure::mc(1, 100), 0.5, FlipKind::Full),
                      std::invalid_argument);
    DisorderMeasure small = DisorderMeasure::exact(8);
    small.dim_cap = 2;
    REQUIRE_THROWS_AS(decompose(m, small, 0.5, FlipKind::Full), std::invalid_argument);
}
