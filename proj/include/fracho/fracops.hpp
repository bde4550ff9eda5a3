#pragma once

// Discrete fractional and integer derivatives on uniform grids starting at 0.
//
// Sign conventions: the left Riemann-Liouville derivative D^a_{0+} integrates
// from 0, the right one D^a_{0-} integrates from x to infinity and carries a
// leading minus sign, so that for integer n
//     D^n_{0+} = d^n/dx^n,   D^n_{0-} = (-1)^n d^n/dx^n.

#include <cstddef>
#include <string>
#include <vector>

namespace fracho::fracops {

/// Order of a derivative: a value in (0, 1] or a positive integer.
class FracOrder {
public:
    explicit FracOrder(double value);
    double value() const noexcept { return value_; }
    bool is_integer() const noexcept;
    int as_integer() const;  ///< throws DomainError for fractional orders

private:
    double value_;
};

struct GridFunction {
    double origin = 0.0;
    double step = 0.0;
    std::vector<double> samples;
    /// Leading/trailing points whose values came from degraded stencils.
    std::size_t low_accuracy_front = 0;
    std::size_t low_accuracy_back = 0;
    std::vector<std::string> warnings;

    GridFunction() = default;
    GridFunction(double step_, std::vector<double> samples_);

    std::size_t size() const noexcept { return samples.size(); }
    double abscissa(std::size_t i) const noexcept { return origin + step * static_cast<double>(i); }
    /// Throws DomainError unless step > 0, size >= 2 and all samples are finite.
    void validate() const;
};

/// Phi_a(t) = t^{-a} / Gamma(1 - a) for t > 0, 0 for t <= 0, and 0 for a = 1.
double phi_alpha(double alpha, double t);

/// w_k = (-1)^k binom(alpha, k), k < count.
std::vector<double> gl_weights(double alpha, std::size_t count);

/// Left RL derivative by Grunwald-Letnikov (first order). Integer orders go
/// through integer_deriv; order 1 uses the backward difference.
GridFunction rl_plus(const GridFunction& f, FracOrder alpha);

/// Left RL derivative of order alpha in (0, 1) by the weighted-shifted
/// Grunwald formula, second order for functions that vanish smoothly at 0.
/// The last point has no right neighbour and falls back to plain GL.
GridFunction rl_plus_second_order(const GridFunction& f, double alpha);

/// A term c * x^p (p > -1) whose left RL derivative is known exactly.
struct PowerTerm {
    double coefficient;
    double exponent;
};

/// D^alpha_{0+} of (regular + sum of power terms). `regular` holds the
/// samples of the smooth remainder, including its limit at 0; the power terms
/// are differentiated analytically (value at 0 reported as 0).
GridFunction rl_plus_with_powers(const GridFunction& regular, double alpha,
                                 const std::vector<PowerTerm>& terms);

/// Right RL derivative. Samples beyond tail_cutoff are ignored and f is taken
/// to vanish past it; a warning is attached when |f| at the cutoff is not
/// below 1e-8 max|f|. Integer n gives (-1)^n integer_deriv(f, n).
GridFunction rl_minus(const GridFunction& f, FracOrder alpha, double tail_cutoff);

/// Caputo derivative of order alpha in (0, 1) by the L1 scheme.
GridFunction caputo(const GridFunction& f, double alpha);

/// n-th derivative from repeated second-order central differences (one-sided
/// second-order formulas at the ends). Needs at least n + 2 points.
GridFunction integer_deriv(const GridFunction& f, int n);

} // namespace fracho::fracops
