#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "spinflip/quadrature.hpp"

using namespace spinflip;

TEST_CASE("gauss-legendre weights sum to the interval length") {
    for (int n : {1, 2, 5, 16, 48, 101}) {
        QuadratureRule r = gauss_legendre(n, -0.3, 2.1);
        double w = 0;
        for (double x : r.weights) w += x;
        REQUIRE(w == Catch::Approx(2.4).epsilon(1e-13));
    }
}

TEST_CASE("gauss-legendre is exact for polynomials of degree 2n-1") {
    QuadratureRule r = gauss_legendre(5, -1.0, 2.0);
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 9);
    // int_{-1}^{2} x^9 dx = (2^10 - 1)/10
    REQUIRE(s == Catch::Approx(1023.0 / 10.0).epsilon(1e-12));
}

TEST_CASE("gauss-legendre smooth integrand") {
    QuadratureRule r = gauss_legendre(16, 0.0, M_PI);
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::sin(r.nodes[i]);
    REQUIRE(s == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gauss-hermite raw rule reproduces Gaussian moments") {
    for (int n : {1, 2, 7, 20, 48}) {
        QuadratureRule r = gauss_hermite(n);
        double w = 0, m2 = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            w += r.weights[i];
            m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
        }
        REQUIRE(w == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));
        if (n >= 2) REQUIRE(m2 == Catch::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
    }
}

TEST_CASE("probability-normalized hermite rule gives standard normal moments") {
    QuadratureRule r = gauss_hermite_prob(12);
    // z = sqrt(2) u is standard normal when u are the raw nodes
    double w = 0, m2 = 0, m4 = 0, m1 = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double z = std::sqrt(2.0) * r.nodes[i];
        w += r.weights[i];
        m1 += r.weights[i] * z;
        m2 += r.weights[i] * z * z;
        m4 += r.weights[i] * z * z * z * z;
    }
    REQUIRE(w == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(std::abs(m1) < 1e-14);
    REQUIRE(m2 == Catch::Approx(1.0).epsilon(1e-13));
    REQUIRE(m4 == Catch::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("hermite nodes are symmetric and ascending") {
    QuadratureRule r = gauss_hermite(15);
    for (std::size_t i = 1; i < r.size(); ++i) REQUIRE(r.nodes[i] > r.nodes[i - 1]);
    for (std::size_t i = 0; i < r.size(); ++i)
        REQUIRE(r.nodes[i] == Catch::Approx(-r.nodes[r.size() - 1 - i]).margin(1e-13));
    REQUIRE(r.nodes[7] == 0.0);
}

TEST_CASE("2d quadrature reproduces the frozen kernel integrals") {
    // closed forms over [0,pi]^2
    double k2 = quadrature_2d(
        [](double t, double s) { double x = std::sin(t - s); return x * x; }, 0, M_PI, 24);
    REQUIRE(k2 == Catch::Approx(M_PI * M_PI / 2.0).epsilon(1e-13));
    double h1 = quadrature_2d(
        [](double t, double s) {
            return (std::cos(t) - std::sin(t)) * (std::cos(s) - std::sin(s));
        },
        0, M_PI, 24);
    REQUIRE(h1 == Catch::Approx(4.0).epsilon(1e-13));
    double one = quadrature_2d([](double, double) { return 1.0; }, 0, M_PI, 24);
    REQUIRE(one == Catch::Approx(M_PI * M_PI).epsilon(1e-13));
}

TEST_CASE("kahan summation keeps small terms") {
    KahanSum s;
    s.add(1e16);
    for (int i = 0; i < 10000; ++i) s.add(1.0);
    s.add(-1e16);
    REQUIRE(s.value() == Catch::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("invalid node counts throw") {
    REQUIRE_THROWS_AS(gauss_legendre(0, 0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}
