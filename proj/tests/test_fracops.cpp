#include "fracho/error.hpp"
#include "fracho/fracops.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracho;
using namespace fracho::fracops;

namespace {
GridFunction sample(double h, int count, double (*f)(double)) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = f(i * h);
    return {h, v};
}
}

TEST_CASE("phi_alpha") {
    for (double t : {1e-6, 0.3, 1.0, 50.0}) CHECK(phi_alpha(1.0, t) == 0.0);
    CHECK(phi_alpha(0.5, -1.0) == 0.0);
    CHECK(phi_alpha(0.5, 1.0) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(phi_alpha(0.3, 2.0) == doctest::Approx(std::pow(2.0, -0.3) / std::tgamma(0.7)).epsilon(1e-14));
}

TEST_CASE("order validation") {
    CHECK_THROWS_AS(FracOrder(0.0), DomainError);
    CHECK_THROWS_AS(FracOrder(1.5), DomainError);
    CHECK(FracOrder(3.0).is_integer());
    CHECK_THROWS_AS(FracOrder(0.5).as_integer(), DomainError);
    GridFunction g(0.1, {1.0, NAN, 2.0});
    CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("GL weights") {
    const auto w = gl_weights(0.5, 4);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == doctest::Approx(-0.5));
    CHECK(w[2] == doctest::Approx(-0.125));
    CHECK(w[3] == doctest::Approx(-0.0625));
}

TEST_CASE("power rule for the left derivatives") {
    const double h = 1.0 / 512, alpha = 0.4;
    const GridFunction f = sample(h, 513, [](double x) { return x * x; });
    const double exact = 2.0 / std::tgamma(3.0 - alpha);
    CHECK(std::abs(rl_plus(f, FracOrder(alpha)).samples.back() - exact) < 1e-2);
    CHECK(std::abs(rl_plus_second_order(f, alpha).samples[400] - exact * std::pow(400 * h, 2 - alpha)) < 1e-4);
    CHECK(std::abs(caputo(f, alpha).samples.back() - exact) < 1e-3);
}

TEST_CASE("power terms are differentiated exactly") {
    const double h = 0.01, alpha = 0.5;
    std::vector<double> zero(201, 0.0);
    const GridFunction out = rl_plus_with_powers(GridFunction(h, zero), alpha, {{2.0, -0.5}});
    // D^{1/2} x^{-1/2} = 0 (Gamma(1/2)/Gamma(0) = 0).
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(std::abs(out.samples[i]) < 1e-14);
    const GridFunction one = rl_plus_with_powers(GridFunction(h, zero), alpha, {{1.0, 1.0}});
    CHECK(one.samples[100] == doctest::Approx(std::tgamma(2.0) / std::tgamma(1.5) * std::sqrt(1.0)));
}

TEST_CASE("integer derivatives and the sign law of the right derivative") {
    const GridFunction f = sample(0.01, 401, [](double x) { return std::sin(x); });
    const GridFunction d2 = integer_deriv(f, 2);
    CHECK(std::abs(d2.samples[200] + std::sin(2.0)) < 1e-4);
    for (int n : {1, 2, 3}) {
        const GridFunction left = rl_plus(f, FracOrder(n));
        const GridFunction right = rl_minus(f, FracOrder(n), 4.0);
        const double sign = (n % 2) ? -1.0 : 1.0;
        for (std::size_t i = 5; i + 5 < f.size(); i += 37) CHECK(right.samples[i] == sign * left.samples[i]);
    }
    CHECK(rl_plus(f, FracOrder(1.0)).samples[100] == doctest::Approx(std::cos(1.0)).epsilon(1e-2));
}

TEST_CASE("right derivative of a decaying exponential") {
    // With the leading minus sign, D^a_{0-} e^{-x} = e^{-x} for every order.
    const double h = 1.0 / 256;
    const GridFunction f = sample(h, 40 * 256 + 1, [](double x) { return std::exp(-x); });
    const GridFunction d = rl_minus(f, FracOrder(0.5), 40.0);
    CHECK(d.warnings.empty());
    CHECK(std::abs(d.samples[256] - std::exp(-1.0)) < 5e-3);
}
