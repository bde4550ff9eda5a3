#include "fracho/error.hpp"
#include "fracho/transforms.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracho;
using namespace fracho::transforms;

TEST_CASE("Laplace transforms by quadrature") {
    CHECK(std::abs(laplace([](double t) { return std::exp(-t); }, 2.0) - 1.0 / 3.0) < 1e-9);
    CHECK(std::abs(laplace([](double t) { return 1.0 / std::sqrt(t); }, 4.0) - std::sqrt(M_PI / 4.0)) < 1e-8);
    const double dl = double_laplace([](double x, double t) { return std::exp(-x - 2 * t); }, 1.0, 1.0);
    CHECK(std::abs(dl - 1.0 / 6.0) < 1e-9);
}

TEST_CASE("Bromwich inversion on Talbot contour and vertical line") {
    const ComplexFunction F = [](Complex s) { return 1.0 / (s + 1.0); };
    for (double x : {0.1, 1.0, 5.0}) CHECK(std::abs(bromwich_invert(F, x) - std::exp(-x)) < 1e-10);
    const ComplexFunction G = [](Complex s) { return std::exp(-std::sqrt(s)); };
    // Inverse of e^{-sqrt s}: the one-sided 1/2-stable density at time 1.
    const double x = 0.7;
    const double levy = std::exp(-1.0 / (4 * x)) / (2 * std::sqrt(M_PI) * std::pow(x, 1.5));
    const Inversion inv = bromwich_invert_detailed(G, x);
    CHECK(std::abs(inv.value - levy) < 1e-10);
    CHECK(inv.imag_residue < 1e-8);
    ContourSpec line;
    line.method = ContourMethod::bromwich_line;
    line.shift = 1.0;
    line.max_node_count = 1 << 16;
    CHECK(std::abs(bromwich_invert(F, 1.0, line) - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("log-space inversion far below the double range") {
    const ComplexFunction logF = [](Complex s) { return -std::sqrt(s); };
    const double x = 1e-3;
    const double expected = -1.0 / (4 * x) - std::log(2 * std::sqrt(M_PI)) - 1.5 * std::log(x);
    ContourSpec c;
    c.scale = 1.0 / (4 * x * x);
    c.max_node_count = 1 << 14;
    CHECK(std::abs(bromwich_invert_log(logF, x, c) - expected) < 1e-8 * std::abs(expected));
}

TEST_CASE("oscillatory Fourier inversion") {
    // Gaussian symbol e^{-zeta^2}: (1/(2 sqrt pi)) e^{-x^2/4}.
    const ComplexFunction g = [](Complex z) { return std::exp(-z * z); };
    for (double x : {0.0, 1.0, 3.0}) {
        CHECK(std::abs(fourier_inverse_osc(g, x) - std::exp(-x * x / 4) / (2 * std::sqrt(M_PI))) < 1e-10);
    }
    // Cauchy symbol e^{-|zeta|}: 1 / (pi (1 + x^2)).
    const ComplexFunction c = [](Complex z) { return std::exp(-std::abs(z.real())); };
    CHECK(std::abs(fourier_inverse_osc(c, 2.0) - 1.0 / (5 * M_PI)) < 1e-9);
    const ComplexFunction grow = [](Complex z) { return std::exp(std::abs(z.real())); };
    CHECK_THROWS_AS(fourier_inverse_osc(grow, 1.0), ConvergenceError);
}

TEST_CASE("specs are validated") {
    QuadratureSpec q;
    q.abs_tol = -1;
    CHECK_THROWS_AS(q.validate(), DomainError);
    ContourSpec c;
    c.node_count = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}
