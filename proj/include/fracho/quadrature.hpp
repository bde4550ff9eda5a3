#pragma once

// Adaptive Gauss-Kronrod integration and accelerated panel sums. This is the
// numerical engine shared by the kernel evaluators and the transform oracles;
// it knows nothing about either.

#include <functional>
#include <vector>

namespace fracho::quad {

using Integrand = std::function<double(double)>;

struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 500;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// 21-point Kronrod rule on [a, b] with the embedded 10-point Gauss estimate.
Result kronrod21(const Integrand& f, double a, double b);

/// Globally adaptive bisection (largest error first) over [a, b].
Result integrate(const Integrand& f, double a, double b, const Tolerance& tol = {});

/// Same, starting from the partition given by sorted `breakpoints` (at least two).
Result integrate(const Integrand& f, const std::vector<double>& breakpoints,
                 const Tolerance& tol = {});

/// Integral over [a, inf) through x = a + (1 - u) / u.
Result integrate_to_infinity(const Integrand& f, double a, const Tolerance& tol = {});

/// Integral over (0, inf) of f(s) ds written as an integral over y = ln s on
/// [ln(center) - L, ln(center) + L]; L is doubled until the two end panels
/// contribute less than the tolerance.
Result integrate_log_scale(const Integrand& f, double center, const Tolerance& tol = {},
                           double initial_half_width = 6.0, double max_half_width = 200.0);

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the best
/// estimate of the limit and an error estimate taken from the last two
/// diagonal entries.
struct Extrapolation {
    double value = 0.0;
    double error = 0.0;
};
Extrapolation wynn_epsilon(const std::vector<double>& partial_sums);

/// Neumaier-compensated sum, fixed left-to-right order.
class CompensatedSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace fracho::quad
