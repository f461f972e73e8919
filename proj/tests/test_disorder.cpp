#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "spinflip/disorder.hpp"
#include "test_models.hpp"

using namespace spinflip;

TEST_CASE("exact ensemble reproduces the coupling moments") {
    InteractionModel m = testmodels::two_spin_fields();
    DisorderEnsemble e = make_ensemble(m, DisorderMeasure::exact(12), /*with_tilde=*/true);
    REQUIRE(e.exact);
    REQUIRE(e.size() == 12u * 12 * 12 * 12);  // 3 couplings + 1 tilde
    double wsum = 0;
    for (double w : e.weights) wsum += w;
    REQUIRE(wsum == Catch::Approx(1.0).epsilon(1e-13));
    for (int k = 0; k < 3; ++k) {
        double mean = 0, var = 0;
        for (std::size_t i = 0; i < e.size(); ++i) mean += e.weights[i] * e.draws[i].j[k];
        for (std::size_t i = 0; i < e.size(); ++i) {
            double d = e.draws[i].j[k] - mean;
            var += e.weights[i] * d * d;
        }
        REQUIRE(mean == Catch::Approx(m.interactions()[k].mu).margin(1e-12));
        REQUIRE(var == Catch::Approx(m.interactions()[k].delta2).epsilon(1e-12));
    }
    // tilde family follows the interior interaction's law
    double tmean = 0;
    for (std::size_t i = 0; i < e.size(); ++i) tmean += e.weights[i] * e.draws[i].jt[0];
    REQUIRE(tmean == Catch::Approx(0.3).margin(1e-12));
}

TEST_CASE("dimension cap rejects oversized quadrature grids") {
    ChainOptions o;
    o.n = 8;
    InteractionModel big = chain_model(o);  // 7 couplings > default cap 6
    REQUIRE_THROWS_AS(make_ensemble(big, DisorderMeasure::exact(8), false),
                      std::invalid_argument);
}

TEST_CASE("monte carlo ensembles are reproducible and roughly unbiased") {
    InteractionModel m = testmodels::single_spin();
    DisorderMeasure meas = DisorderMeasure::mc(/*seed=*/11, /*n=*/40000);
    DisorderEnsemble a = make_ensemble(m, meas, false);
    DisorderEnsemble b = make_ensemble(m, meas, false);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < 100; ++i) REQUIRE(a.draws[i].j[0] == b.draws[i].j[0]);
    double mean = 0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += a.weights[i] * a.draws[i].j[0];
    REQUIRE(mean == Catch::Approx(0.3).margin(0.02));  // SE = 1/200
}

TEST_CASE("disorder expectation: exact second moment and MC errors") {
    InteractionModel m = testmodels::single_spin(0.3, 1.0);
    auto jsq = [](const CouplingAssignment& c) { return c.j[0] * c.j[0]; };
    QuenchedEstimate q = disorder_expectation(jsq, m, DisorderMeasure::exact(16), false);
    REQUIRE(q.exact);
    REQUIRE(q.std_error == 0.0);
    REQUIRE(q.value == Catch::Approx(0.3 * 0.3 + 1.0).epsilon(1e-13));

    QuenchedEstimate mc = disorder_expectation(jsq, m, DisorderMeasure::mc(3, 20000), false);
    REQUIRE_FALSE(mc.exact);
    REQUIRE(mc.std_error > 0.0);
    REQUIRE(std::abs(mc.value - 1.09) < 4.0 * mc.std_error);
}

TEST_CASE("gaussian integration by parts holds on the quadrature grid") {
    InteractionModel m = testmodels::two_spin_fields();
    DisorderMeasure meas = DisorderMeasure::exact(20);
    // psi = J_0: Av(J_0 psi) - mu Av(psi) = Delta^2 * 1
    auto psi = [](const CouplingAssignment& c) { return c.j[0]; };
    auto dpsi = [](const CouplingAssignment&) { return 1.0; };
    REQUIRE(ibp_residual(m, meas, 0, psi, dpsi) < 1e-12);

    // a genuinely nonlinear observable, analytic derivative
    auto psi3 = [](const CouplingAssignment& c) { return std::tanh(c.j[0] + 0.5 * c.j[1]); };
    auto dpsi3 = [](const CouplingAssignment& c) {
        double t = std::tanh(c.j[0] + 0.5 * c.j[1]);
        return 1.0 - t * t;
    };
    // tanh is not polynomial, so the 20-node grid leaves quadrature error
    REQUIRE(ibp_residual(m, meas, 0, psi3, dpsi3) < 1e-5);
    // finite-difference fallback agrees
    REQUIRE(ibp_residual(m, meas, 0, psi3) < 1e-5);
    // and for a coupling the observable does not depend on, both covariance
    // and derivative vanish
    auto psi0 = [](const CouplingAssignment& c) { return std::cos(c.j[0]); };
    REQUIRE(ibp_residual(m, meas, 2, psi0) < 1e-9);
}

TEST_CASE("invalid measures throw") {
    InteractionModel m = testmodels::single_spin();
    DisorderMeasure bad = DisorderMeasure::mc(1, 0);
    REQUIRE_THROWS_AS(make_ensemble(m, bad, false), std::invalid_argument);
}
