#include "fracho/error.hpp"
#include "fracho/verify.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace fracho;
using namespace fracho::verify;

TEST_CASE("report line format") {
    ResidualReport r;
    r.id = "X(1)";
    r.max_abs_residual = 1.234567e-4;
    r.rms_residual = 2e-5;
    r.refinement_ratio = 3.9;
    r.passed = true;
    CHECK(format_report_line(r) == "X(1) 1.23457e-04 2.00000e-05 3.90000e+00 PASS");
    r.refinement_ratio = NAN;
    r.passed = false;
    CHECK(format_report_line(r) == "X(1) 1.23457e-04 2.00000e-05 nan FAIL");
}

TEST_CASE("equation specs are validated") {
    CHECK_THROWS_AS(EquationSpec::pde_h(1.5).validate(), DomainError);
    CHECK_THROWS_AS(EquationSpec::thm_l(0.5, 1).validate(), DomainError);
    CHECK_THROWS_AS(EquationSpec::pde_pseudo(2, -1).validate(), DomainError);
    EquationSpec e = EquationSpec::pde_l(0.5);
    e.grid = {2.0, 1.0, 0.5, 1.0};
    CHECK_THROWS_AS(e.validate(), DomainError);
    CHECK(EquationSpec::thm_l(0.5, 2).label() == "THM_L(0.5,2)");
    CHECK(EquationSpec::pde_compose(0.5, 1.0 / 3.0, true).label() == "PDE_COMPOSE_CAPUTO(0.5,0.333333)");
}

TEST_CASE("a residual study passes, is deterministic and rejects a non-solution") {
    EquationSpec e = EquationSpec::coro_l(2);
    const ResidualReport a = residual(e);
    const ResidualReport b = residual(e);
    CHECK(a.passed);
    CHECK(a.refinement_ratio > 1.5);
    CHECK(a.max_abs_residual == b.max_abs_residual);
    CHECK(a.rms_residual == b.rms_residual);
    CHECK(format_report_line(a) == format_report_line(b));

    // (x/t)^2 times the heat kernel is not a solution; its residual stays O(1).
    const ResidualReport non_solution = lemma1_power_check(2, 1, 2, {-2.0, 2.0, 1.0, 2.0}, 64);
    CHECK_FALSE(non_solution.passed);
    CHECK(non_solution.max_abs_residual > 0.1);
    CHECK(lemma1_power_check(2, 1, 1, {-2.0, 2.0, 1.0, 2.0}, 64).passed);
}

TEST_CASE("boundary limits") {
    for (const auto& b : boundary_check(EquationSpec::pde_l(0.5))) CHECK(b.deviation < b.tolerance);
    for (const auto& b : boundary_check(EquationSpec::coro_h(2))) CHECK(b.deviation < b.tolerance);
    CHECK(boundary_check(EquationSpec::pde_umn(2, 2)).empty());
}

TEST_CASE("subordinator identity with and without the factor nu") {
    const Lattice small{0.5, 2.0, 3};
    const ResidualReport ok = lemma0_check(0.5, small);
    CHECK(ok.passed);
    const ResidualReport printed = lemma0_check_uncorrected(0.5, small);
    CHECK_FALSE(printed.passed);
    CHECK(printed.max_abs_residual == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("parallel_for covers every index and rethrows the lowest failure") {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    try {
        parallel_for(10, [](std::size_t i) {
            if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "3");
    }
}

TEST_CASE("suite order") {
    const auto eqs = default_equations();
    REQUIRE(eqs.size() == 18);
    CHECK(eqs.front().label() == "PDE_H(0.5)");
    CHECK(eqs.back().label() == "PDE_UMN(2,2)");
}
