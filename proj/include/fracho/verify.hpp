#pragma once

// Grid residuals, boundary limits and transform identities for the kernels.
//
// A residual check samples a kernel on a rectangle, applies the equation's
// operators with fracops and reports the interior residual on a base grid and
// on one halving. Axes that carry a left fractional derivative are sampled
// from 0, since the derivative needs the whole history.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fracho::verify {

enum class EquationId {
    PDE_H,        ///< d_t h + D^nu_{0+,x} h = 0
    PDE_L,        ///< D^nu_{0+,t} l + d_x l = 0 for x > 0
    PDE_COMPOSE,  ///< D^nu1_{0+,t} f + D^nu2_{0+,x} f = 0 for x > 0
    THM_L,        ///< (-1)^n d^n_x l_{nu/n} - D^nu_{0+,t} l_{nu/n} = 0
    THM_H,        ///< (-1)^n d^n_t h_{nu/n} - D^nu_{0+,x} h_{nu/n} = 0
    CORO_L,       ///< THM_L with nu = 1
    CORO_H,       ///< THM_H with nu = 1
    PDE_PSEUDO,   ///< d_t v - kappa d^n_x v = 0
    PDE_UMN,      ///< (-1)^n d^n_t u + (-1)^m d^m_x u = 0
};

const char* equation_name(EquationId id);

struct Rect {
    double x0 = 0.2, x1 = 3.0, t0 = 0.2, t1 = 3.0;
};

struct EquationSpec {
    EquationId id = EquationId::PDE_H;
    double nu = 0.5;
    double nu1 = 0.5;
    double nu2 = 1.0 / 3.0;
    int n = 2;
    int m = 2;
    int kappa = 1;
    /// PDE_COMPOSE only: Caputo (L1) derivative in t instead of RL.
    bool caputo_form = false;
    Rect grid;
    /// Base steps; 0 means (side length) / 64, or / 512 on an axis sampled
    /// from 0, where the kernel is sharp near the origin. The check also runs
    /// at half these steps.
    double hx = 0.0;
    double ht = 0.0;
    double tolerance = 1e-3;

    static EquationSpec pde_h(double nu);
    static EquationSpec pde_l(double nu);
    static EquationSpec pde_compose(double nu1, double nu2, bool caputo);
    static EquationSpec thm_l(double nu, int n);
    static EquationSpec thm_h(double nu, int n);
    static EquationSpec coro_l(int n);
    static EquationSpec coro_h(int n);
    static EquationSpec pde_pseudo(int n, int kappa);
    static EquationSpec pde_umn(int m, int n);

    /// Throws DomainError for parameters outside the equation's range.
    void validate() const;
    /// Check id used in reports, e.g. "THM_L(0.5,2)".
    std::string label() const;
};

struct BoundaryCheck {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
};

struct ResidualReport {
    std::string id;
    double max_abs_residual = 0.0;  ///< on the halved grid
    double rms_residual = 0.0;      ///< on the halved grid
    std::vector<BoundaryCheck> boundary_checks;
    /// max residual on the base grid over max residual on the halved grid;
    /// NaN for checks without a grid.
    double refinement_ratio = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::vector<std::string> diagnostics;
};

/// Interior residual on the base grid and on one halving, plus boundary_check.
ResidualReport residual(const EquationSpec& eq);

/// Boundary limits for the equation's family; empty when none apply.
/// Limits are taken by Richardson extrapolation over x_j = x0 2^{-j}, j = 0..4.
std::vector<BoundaryCheck> boundary_check(const EquationSpec& eq);

/// Log-spaced lattice of `points` values per axis on [lo, hi].
struct Lattice {
    double lo = 0.1, hi = 10.0;
    int points = 10;
    std::vector<double> values() const;
};

/// Max relative deviation of h_nu(x, t) = nu (t/x) l_nu(t, x) from the
/// Bromwich inversion of exp(-t lambda^nu), over lattice x lattice. The
/// deviation of the same comparison without the factor nu goes into
/// diagnostics. Tolerance 1e-6 for nu = 0.5, 1e-5 otherwise.
ResidualReport lemma0_check(double nu, const Lattice& lattice = {});

/// Variant reporting the comparison exactly without the factor nu, i.e.
/// (t/x) l_nu(t, x) against the oracle.
ResidualReport lemma0_check_uncorrected(double nu, const Lattice& lattice = {});

/// (x/t) v_n against the pseudo equation on `grid` (base grid and one
/// halving), and d^{n-1}_x v_n + (kappa/n)(x/t) v_n = 0 at sample points by
/// Richardson-extrapolated central differences of the closed form. The
/// residual of (x/t)^2 v_n, which is not a solution, goes into diagnostics.
ResidualReport lemma1_check(int n, int kappa, const Rect& grid = {-2.0, 2.0, 1.0, 2.0},
                            int intervals = 128);

/// Residual study of (x/t)^power v_n alone (power 1 or 2).
ResidualReport lemma1_power_check(int n, int kappa, int power,
                                  const Rect& grid = {-2.0, 2.0, 1.0, 2.0}, int intervals = 128);

/// One report per transform identity, in a fixed order.
std::vector<ResidualReport> laplace_identity_suite();

/// `<id> <max> <rms> <ratio> <PASS|FAIL>`, numbers as %.5e.
std::string format_report_line(const ResidualReport& r);

/// Equation specs of the full suite in fixed order.
std::vector<EquationSpec> default_equations();

/// Every check in fixed order: equations, Lemma 0 for nu in {0.3, 0.5, 0.7},
/// Lemma 1 for (n, kappa) in {(2, 1), (3, 1), (3, -1)}, then the identities.
std::vector<ResidualReport> run_all();

/// Runs f(i) for i < count on worker threads; results are indexed, so the
/// outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

} // namespace fracho::verify
