#include "fracho/error.hpp"
#include "fracho/fracops.hpp"
#include "fracho/kernels.hpp"
#include "fracho/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracho;
using namespace fracho::kernels;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double mass(const std::function<double(double)>& f, double center) {
    return quad::integrate_log_scale(f, center, {1e-13, 1e-11, 2000}).value;
}
}

TEST_CASE("l and h at reference points") {
    CHECK(l_density(0.5, 0.0, 1.0).value == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(l_density(0.5, 1.0, 1.0).value == doctest::Approx(std::exp(-0.25) / std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(h_density(0.5, 1.0, 1.0).value == doctest::Approx(0.219695644733861).epsilon(1e-12));
    CHECK(h_density(0.5, 0.0, 1.0).value == 0.0);
    CHECK(l_density(0.3, 0.0, 2.0).value == doctest::Approx(fracops::phi_alpha(0.3, 2.0)).epsilon(1e-13));
}

TEST_CASE("densities integrate to one") {
    for (double nu : {0.3, 0.5, 0.7}) {
        CHECK(std::abs(mass([nu](double x) { return l_density(nu, x, 1.3).value; }, 1.0) - 1.0) < 1e-9);
        CHECK(std::abs(mass([nu](double x) { return h_density(nu, x, 0.8).value; }, 1.0) - 1.0) < 1e-9);
        CHECK(std::abs(mass([nu](double x) { return lamperti(nu, x).value; }, 1.0) - 1.0) < 1e-9);
    }
}

TEST_CASE("deep tail keeps its logarithm") {
    const KernelValue v = h_density(0.5, 1e-4, 1.0);
    const double expected = std::log(1.0 / (2 * std::sqrt(M_PI))) - 1.5 * std::log(1e-4) - 1.0 / (4e-4);
    CHECK(v.value == 0.0);
    CHECK(std::abs(v.log_abs - expected) < 1e-9 * std::abs(expected));
    const KernelValue w = l_density(0.7, 60.0, 1.0);
    CHECK(std::isfinite(w.log_abs));
    CHECK(w.value >= 0.0);
}

TEST_CASE("closed forms") {
    CHECK(u_closed(ClosedForm::U3, 1.0, 1.0).value == doctest::Approx(2.0 / (std::pow(3.0, 2.5) * M_PI)));
    for (double x : {0.5, 1.0, 2.0}) {
        CHECK(rel(u_closed(ClosedForm::U1, x, 1.0).value, l_density(1.0 / 3.0, x, 1.0).value) < 1e-8);
        CHECK(rel(u2_subordinated(x, 1.0).value, u_mn(3, 2, x, 1.0).value) < 1e-6);
    }
    // Printed u3 carries mass 4/27 on the half line.
    CHECK(std::abs(mass([](double x) { return u_closed(ClosedForm::U3, x, 1.0).value; }, 1.0) - 4.0 / 27.0) < 1e-9);
}

TEST_CASE("pseudo kernels") {
    for (double x : {-2.0, 0.0, 1.5}) {
        const double g = std::exp(-x * x / 4) / std::sqrt(4 * M_PI);
        CHECK(std::abs(pseudo_kernel(2, 1, x, 1.0).value - g) < 1e-10);
    }
    CHECK_THROWS_AS(pseudo_kernel(2, -1, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(pseudo_kernel(4, 1, 0.0, 1.0), DomainError);
}

TEST_CASE("compositions") {
    CHECK(rel(u_mn(2, 2, 1.0, 1.0).value, 1.0 / M_PI) < 1e-8);
    CHECK(rel(folded_stable(2.0, 1.0, 1.0).value, l_density(0.5, 1.0, 1.0).value) < 1e-8);
    const std::vector<double> xs{0.0, 0.25, 1.0, 2.0}, ts{0.0, 0.5, 1.5};
    const GridValues g = compose_grid(0.5, 1.0 / 3.0, xs, ts);
    for (std::size_t j = 0; j < ts.size(); ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double ref = (xs[i] > 0.0 && ts[j] > 0.0) ? compose_density(0.5, 1.0 / 3.0, xs[i], ts[j]).value : 0.0;
            CHECK(std::abs(g.at(i, j) - ref) < 1e-11);
        }
    }
    const GridValues u = u_mn_grid(2, 2, {0.5, 1.0}, {1.0, 2.0});
    CHECK(std::abs(u.at(1, 1) - u_mn(2, 2, 1.0, 2.0).value) < 1e-11);
}

TEST_CASE("specs and symmetric extension") {
    CHECK_THROWS_AS(KernelSpec::l(1.2).validate(), DomainError);
    CHECK_THROWS_AS(KernelSpec::compose(0.5, 0.0).validate(), DomainError);
    const KernelSpec s = KernelSpec::l(0.5);
    CHECK(symmetric_extension(s, -1.0, 1.0).value == evaluate(s, 1.0, 1.0).value);
    CHECK(std::string(method_name(Method::series)) == "series");
    CHECK(levy_exponent(0.5, 4.0) == std::polar(2.0, -M_PI / 4));
}
