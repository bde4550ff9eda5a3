#pragma once

// Real-argument special functions used by the density kernels: generalized
// Mittag-Leffler, Wright, modified Bessel I and K, Airy Ai, Tricomi U and
// Whittaker W. Series are summed directly; when the requested tolerance
// cannot be met (too many terms, or cancellation eating the digits) the
// functions throw ConvergenceError instead of returning a value.

#include <optional>

namespace fracho::specfun {

struct SeriesControl {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_terms = 2000;

    /// Throws DomainError unless abs_tol > 0, rel_tol > 0 and max_terms >= 1.
    void validate() const;
};

struct SpecialValue {
    double value = 0.0;
    double error_estimate = 0.0;
    int terms_used = 0;
};

/// Mittag-Leffler E_{alpha,beta}(z) is summed only for |z| <= this.
inline constexpr double kMittagLefflerCutoff = 30.0;

/// 1/Gamma(x), exactly zero at x = 0, -1, -2, ...
double rgamma(double x);

/// sin(pi x) with exact zeros at the integers.
double sinpi(double x);

struct SignedLog {
    double log_abs;  ///< -inf when the value is zero
    int sign;        ///< -1, 0 or +1
};
/// log|1/Gamma(x)| together with the sign of 1/Gamma(x).
SignedLog log_rgamma(double x);

/// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta), alpha > 0, |z| <= 30.
SpecialValue mittag_leffler(double alpha, double beta, double z, const SeriesControl& ctl = {});

/// W_{lambda,mu}(z) = sum_k z^k / (k! Gamma(lambda k + mu)), lambda > -1.
SpecialValue wright(double lambda, double mu, double z, const SeriesControl& ctl = {});

/// As wright(), but returns nullopt instead of throwing when the tolerance is
/// not met. Argument errors still throw.
std::optional<SpecialValue> try_wright(double lambda, double mu, double z,
                                       const SeriesControl& ctl = {});

/// I_nu(z) = sum_k (z/2)^{2k+nu} / (k! Gamma(k+nu+1)), z >= 0.
SpecialValue bessel_i(double nu, double z, const SeriesControl& ctl = {});

/// Macdonald function K_nu(z), z > 0. For z <= 2 it is formed from
/// (pi/2)(I_{-nu} - I_nu)/sin(nu pi), averaging nu +- 1e-6 at integer nu.
/// Beyond that the difference cancels too badly and
/// K_nu(z) = int_0^inf exp(-z cosh u) cosh(nu u) du is integrated instead.
SpecialValue bessel_k(double nu, double z);

/// Airy Ai(z) from its Maclaurin series.
SpecialValue airy_ai(double z);

/// Tricomi U(a, b, z) = (1/Gamma(a)) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt
/// for a > 0, z > 0; U(0, b, z) = 1.
SpecialValue confluent_u(double a, double b, double z);

/// Whittaker W_{kappa,mu}(z) = z^{mu+1/2} e^{-z/2} U(1/2 - kappa + mu, 2 mu + 1, z), z > 0.
SpecialValue whittaker_w(double kappa, double mu, double z);

} // namespace fracho::specfun
