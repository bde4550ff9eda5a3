#include "fracho/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracho::quad;

TEST_CASE("Kronrod rule integrates polynomials exactly") {
    const Result r = kronrod21([](double x) { return std::pow(x, 20) - 3 * x * x; }, -1.0, 2.0);
    const double exact = (std::pow(2.0, 21) + 1.0) / 21.0 - (8.0 + 1.0);
    CHECK(std::abs(r.value - exact) < 1e-9 * std::abs(exact));
}

TEST_CASE("adaptive integration handles endpoint singularities") {
    const Result r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 2.0) < 1e-9);
    const Result log = integrate([](double x) { return std::log(x); }, {0.0, 0.5, 1.0});
    CHECK(std::abs(log.value + 1.0) < 1e-10);
}

TEST_CASE("half-line and log-scale integrals") {
    const Result e = integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0);
    CHECK(std::abs(e.value - std::exp(-1.0)) < 1e-11);
    const Result lg = integrate_log_scale([](double s) { return std::exp(-s * s / 1e6) / 1e3; }, 1e3);
    CHECK(std::abs(lg.value - std::sqrt(M_PI) / 2.0) < 1e-10);
}

TEST_CASE("Wynn epsilon accelerates an alternating series") {
    std::vector<double> partial;
    double s = 0.0;
    for (int k = 1; k <= 16; ++k) {
        s += (k % 2 ? 1.0 : -1.0) / k;
        partial.push_back(s);
    }
    const Extrapolation ex = wynn_epsilon(partial);
    CHECK(std::abs(ex.value - std::log(2.0)) < 1e-9);
}

TEST_CASE("compensated sum keeps small terms") {
    CompensatedSum c;
    c.add(1.0);
    for (int i = 0; i < 1000; ++i) c.add(1e-16);
    c.add(-1.0);
    CHECK(std::abs(c.value() - 1e-13) < 1e-20);
}
