#pragma once
// Gauss-Legendre and Gauss-Hermite rules plus compensated summation.
// Rules are computed by Newton iteration on the orthonormal three-term
// recurrences, so node counts in the hundreds are no problem.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace spinflip {

struct KahanSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre on [a,b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double eps = 1e-15;
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess for the i-th root of P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < eps) break;
        }
        double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        r.nodes[i] = xm - xl * x;
        r.nodes[n - 1 - i] = xm + xl * x;
        double w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

// Physicists' Gauss-Hermite: sum_i w_i f(x_i) ~ int e^{-x^2} f(x) dx.
inline QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double eps = 1e-14;
    const double pim4 = 0.751125544464943;  // pi^{-1/4}
    int m = (n + 1) / 2;
    double x = 0.0;
    for (int i = 0; i < m; ++i) {
        // largest-to-smallest root initial guesses (standard empirical forms)
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x -= 1.14 * std::pow((double)n, 0.426) / x;
        else if (i == 2)
            x = 1.86 * x - 0.86 * r.nodes[0];
        else if (i == 3)
            x = 1.91 * x - 0.91 * r.nodes[1];
        else
            x = 2.0 * x - r.nodes[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            // orthonormal Hermite recurrence
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt((double)j / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < eps) break;
        }
        r.nodes[i] = x;  // store descending in first half, mirror below
        r.weights[i] = 2.0 / (pp * pp);
    }
    // mirror to full symmetric rule, ascending order
    std::vector<double> xs(n), ws(n);
    for (int i = 0; i < m; ++i) {
        xs[i] = -r.nodes[i];
        ws[i] = r.weights[i];
        xs[n - 1 - i] = r.nodes[i];
        ws[n - 1 - i] = r.weights[i];
    }
    if (n % 2 == 1) xs[m - 1] = 0.0;  // kill -0
    r.nodes = std::move(xs);
    r.weights = std::move(ws);
    return r;
}

// Probability-normalized Hermite rule: weights sum to 1, nodes are standard
// normal abscissae under J = mu + sqrt(2*delta2)*u with raw nodes u.
inline QuadratureRule gauss_hermite_prob(int n) {
    QuadratureRule r = gauss_hermite(n);
    const double s = 1.0 / std::sqrt(M_PI);
    for (auto& w : r.weights) w *= s;
    return r;
}

// Tensor Gauss-Legendre over [a,b]^2.
inline double quadrature_2d(const std::function<double(double, double)>& f,
                            double a, double b, int nodes_per_axis) {
    if (nodes_per_axis < 2) throw std::invalid_argument("quadrature_2d: nodes < 2");
    QuadratureRule g = gauss_legendre(nodes_per_axis, a, b);
    KahanSum acc;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            acc.add(g.weights[i] * g.weights[j] * f(g.nodes[i], g.nodes[j]));
    return acc.value();
}

}  // namespace spinflip
