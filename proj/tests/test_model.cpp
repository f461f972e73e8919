#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "spinflip/model.hpp"
#include "test_models.hpp"

using namespace spinflip;

TEST_CASE("chain builder classifies interior and remainder") {
    // chain of 3 with pair couplings only and subregion {0,1}:
    // bond (0,1) is interior, bond (1,2) straddles the boundary
    ChainOptions o;
    o.n = 3;
    o.bond_mu = 0.3;
    o.bond_delta2 = 1.0;
    o.region_first = 2;
    InteractionModel m = chain_model(o);
    REQUIRE(m.n_interactions() == 2);
    REQUIRE(m.interior() == std::vector<int>{0});
    REQUIRE(m.remainder() == std::vector<int>{1});
    REQUIRE(m.region_size() == 2);
    REQUIRE(m.interactions()[0].mu == 0.3);
    REQUIRE(m.interior_slot(0) == 0);
    REQUIRE(m.interior_slot(1) == -1);
}

TEST_CASE("ea2d builder: periodic 3x3 lattice has 18 bonds") {
    Ea2dOptions o;
    o.side = 3;
    o.mu = 0.5;
    InteractionModel m = ea2d_model(o);
    REQUIRE(m.n_sites() == 9);
    REQUIRE(m.n_interactions() == 18);
    REQUIRE(m.region_size() == 9);
    // every site touches 4 bonds
    for (int s = 0; s < 9; ++s) {
        int deg = 0;
        for (auto mask : m.masks())
            if (mask & (1u << s)) ++deg;
        REQUIRE(deg == 4);
    }
}

TEST_CASE("hamiltonian evaluation on a worked example") {
    // chain(3), J01 = 1, J12 = -2, sigma = (+,+,-): H = -1*(+1) - (-2)*(-1) = -3
    ChainOptions o;
    o.n = 3;
    InteractionModel m = chain_model(o);
    CouplingAssignment c;
    c.j = {1.0, -2.0};
    std::uint32_t state = 0b100;  // spin 2 down
    REQUIRE(hamiltonian_eval(m, c, state, HamiltonianPart::Full) == -3.0);
}

TEST_CASE("sigma_X is the parity of down spins inside the support") {
    REQUIRE(InteractionModel::sigma(0b000, 0b011) == 1);
    REQUIRE(InteractionModel::sigma(0b001, 0b011) == -1);
    REQUIRE(InteractionModel::sigma(0b011, 0b011) == 1);
    REQUIRE(InteractionModel::sigma(0b101, 0b011) == -1);
}

TEST_CASE("deterministic parts B, D, C") {
    InteractionModel m = testmodels::two_spin_fields();
    // interior family = field on site 0 only
    REQUIRE(m.interior().size() == 1);
    REQUIRE(m.d_part() == 1.0);
    REQUIRE(m.b_part(0b00) == -0.3);  // -mu * sigma_0
    REQUIRE(m.b_part(0b01) == 0.3);
    REQUIRE(m.c_part(0b00, 0b00) == 1.0);
    REQUIRE(m.c_part(0b00, 0b01) == -1.0);
}

TEST_CASE("hamiltonian parts split consistently") {
    InteractionModel m = testmodels::two_spin_fields();
    CouplingAssignment c;
    c.j = {0.7, -0.4, 1.1};
    for (std::uint32_t s = 0; s < 4; ++s) {
        double full = hamiltonian_eval(m, c, s, HamiltonianPart::Full);
        double in = hamiltonian_eval(m, c, s, HamiltonianPart::Interior);
        double rem = hamiltonian_eval(m, c, s, HamiltonianPart::Remainder);
        REQUIRE(full == Catch::Approx(in + rem).margin(1e-15));
        double cen = hamiltonian_eval(m, c, s, HamiltonianPart::InteriorCentered);
        double b = hamiltonian_eval(m, c, s, HamiltonianPart::BOnly);
        REQUIRE(in == Catch::Approx(cen + b).margin(1e-15));
    }
}

TEST_CASE("flips act on interior couplings only") {
    InteractionModel m = testmodels::two_spin_fields();
    CouplingAssignment c;
    c.j = {0.7, -0.4, 1.1};
    CouplingAssignment f = flip_full(c, m);
    REQUIRE(f.j == std::vector<double>{-0.7, -0.4, 1.1});
    CouplingAssignment f0 = flip_centered(c, m);
    REQUIRE(f0.j[0] == Catch::Approx(2 * 0.3 - 0.7));
    REQUIRE(f0.j[1] == -0.4);
    REQUIRE(f0.j[2] == 1.1);
    // both flips are involutions
    REQUIRE(flip_full(f, m).j == c.j);
    REQUIRE(flip_centered(f0, m).j[0] == Catch::Approx(0.7));
}

TEST_CASE("stability constants") {
    // chain of 4, centered unit-variance bonds: 3 bonds over 4 sites
    ChainOptions o;
    o.n = 4;
    InteractionModel chain4 = chain_model(o);
    REQUIRE(chain4.stability_constant().full == Catch::Approx(0.75));

    // single spin with |mu| = 2 dominating the variance
    InteractionModel ss(1, {{{0}, 2.0, 1.0}}, {0});
    REQUIRE(ss.stability_constant().full == Catch::Approx(2.0));

    // periodic 3x3 lattice, mu = 0.5: 18 * 1.0 / 9 = 2 from the variances
    Ea2dOptions e;
    e.side = 3;
    e.mu = 0.5;
    REQUIRE(ea2d_model(e).stability_constant().full == Catch::Approx(2.0));
}

TEST_CASE("model validation") {
    REQUIRE_THROWS_AS(InteractionModel(2, {{{}, 0.0, 1.0}}, {0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InteractionModel(2, {{{0, 2}, 0.0, 1.0}}, {0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InteractionModel(2, {{{0}, 0.0, -1.0}}, {0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InteractionModel(2, {{{0, 0}, 0.0, 1.0}}, {0}), std::invalid_argument);
    REQUIRE_THROWS_AS(
        InteractionModel(2, {{{0, 1}, 0.0, 1.0}, {{1, 0}, 0.0, 1.0}}, {0}),
        std::invalid_argument);
    REQUIRE_THROWS_AS(InteractionModel(2, {{{0}, 0.0, 1.0}}, {5}), std::invalid_argument);
}
