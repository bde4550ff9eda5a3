#pragma once

// Transform-based reference computations: Laplace transforms by quadrature,
// Bromwich inversion along a Talbot contour (or a vertical line), and inverse
// Fourier integrals of oscillatory symbols. This module depends only on the
// quadrature engine.

#include <complex>
#include <functional>

namespace fracho::transforms {

using RealFunction = std::function<double(double)>;
using RealFunction2 = std::function<double(double, double)>;
using Complex = std::complex<double>;
using ComplexFunction = std::function<Complex(Complex)>;

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 500;
    /// Initial truncation point for half-line integrals; doubled until the
    /// newest panel contributes less than abs_tol.
    double tail_cutoff = 1.0;

    void validate() const;
};

enum class ContourMethod { talbot, bromwich_line };

struct ContourSpec {
    ContourMethod method = ContourMethod::talbot;
    int node_count = 32;
    /// Abscissa of the vertical line, or the shift sigma of the Talbot contour.
    double shift = 0.0;
    /// Talbot size parameter r; 0 selects 0.4 * node_count / x. A positive value
    /// acts as a lower bound (useful to pass near a saddle point).
    double scale = 0.0;
    /// Stop doubling the node count once successive estimates agree to this.
    double rel_tol = 1e-12;
    int max_node_count = 1024;

    void validate() const;
};

/// int_0^inf e^{-lambda t} f(t) dt.
double laplace(const RealFunction& f, double lambda, const QuadratureSpec& q = {});

/// int_0^inf int_0^inf e^{-lambda t - xi x} f(x, t) dx dt, inner integral in x.
double double_laplace(const RealFunction2& f, double xi, double lambda, const QuadratureSpec& q = {});

struct Inversion {
    double value = 0.0;
    double error = 0.0;          ///< difference between the last two node counts
    double imag_residue = 0.0;   ///< relative departure of F from conjugate symmetry
    int node_count = 0;
};

/// Inverse Laplace transform of F at x > 0. Throws ConvergenceError when the
/// node count limit is hit or the imaginary residue exceeds 1e-8 relative.
double bromwich_invert(const ComplexFunction& F, double x, const ContourSpec& c = {});
Inversion bromwich_invert_detailed(const ComplexFunction& F, double x, const ContourSpec& c = {});

/// Talbot inversion working with log F, for values far below the double
/// range. Returns log f(x); requires f(x) > 0.
double bromwich_invert_log(const ComplexFunction& logF, double x, const ContourSpec& c = {});

/// (1 / 2 pi) int_R e^{-i zeta x} symbol(zeta) d zeta. Each half-line is cut
/// into panels over which the phase advances by about pi; the panel sums are
/// accelerated with the epsilon algorithm. Throws ConvergenceError on growth
/// of the symbol, non-convergence, or an imaginary part above
/// max(abs_tol, 1e-8 |value|).
double fourier_inverse_osc(const ComplexFunction& symbol, double x, const QuadratureSpec& q = {});

struct FourierResult {
    double value = 0.0;
    double imag = 0.0;
    double error = 0.0;
    int panels = 0;
};
FourierResult fourier_inverse_detailed(const ComplexFunction& symbol, double x,
                                       const QuadratureSpec& q = {});

} // namespace fracho::transforms
