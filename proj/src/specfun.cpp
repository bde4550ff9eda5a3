#include "fracho/specfun.hpp"

#include "fracho/error.hpp"
#include "fracho/quadrature.hpp"

#include <math.h>  // lgamma_r

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fracho::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Value of one series term plus a bound on its relative rounding error in
// units of eps.
struct Term {
    double value;
    double rel_units;
};

struct Outcome {
    SpecialValue sv;
    bool ok;
    std::string why;
};

// Sums next(k) for k = 0, 1, ... until the envelope of the terms has been
// decreasing and is negligible against the tolerance. Terms may vanish
// sporadically (gamma poles), so decisions use the maximum magnitude over
// blocks of four terms rather than single terms.
template <class Next>
Outcome sum_series(Next&& next, const SeriesControl& ctl) {
    constexpr int kBlock = 4;
    quad::CompensatedSum sum;
    double round = 0.0;
    double block_max = 0.0;
    double prev_block_max = -1.0;
    int k = 0;
    for (; k < ctl.max_terms; ++k) {
        const Term t = next(k);
        if (!std::isfinite(t.value)) {
            return {{sum.value(), std::numeric_limits<double>::infinity(), k + 1}, false,
                    "series term overflow"};
        }
        sum.add(t.value);
        round += std::abs(t.value) * (t.rel_units + 2.0);
        block_max = std::max(block_max, std::abs(t.value));
        if ((k + 1) % kBlock != 0) continue;

        const double s = sum.value();
        const double target = ctl.abs_tol + ctl.rel_tol * std::abs(s);
        const double round_err = kEps * (round + std::abs(s));
        if (block_max == 0.0 && prev_block_max == 0.0) {
            return {{s, round_err, k + 1}, round_err <= target, "cancellation"};
        }
        if (prev_block_max >= 0.0 && block_max < prev_block_max) {
            const double q = std::pow(block_max / prev_block_max, 1.0 / kBlock);
            const double tail = q < 0.95 ? kBlock * block_max * q / (1.0 - q)
                                         : std::numeric_limits<double>::infinity();
            if (tail <= 0.01 * target) {
                const double err = tail + round_err;
                if (err <= target) return {{s, err, k + 1}, true, {}};
                return {{s, err, k + 1}, false, "rounding error exceeds tolerance"};
            }
        }
        prev_block_max = block_max;
        block_max = 0.0;
    }
    return {{sum.value(), std::numeric_limits<double>::infinity(), k}, false,
            "max_terms reached"};
}

SpecialValue require(const Outcome& o, const char* name) {
    if (!o.ok) {
        throw ConvergenceError(std::string(name) + ": " + o.why + " after " +
                               std::to_string(o.sv.terms_used) + " terms");
    }
    return o.sv;
}

// z^k/k! * 1/Gamma(lambda k + mu), switching to logarithms once the direct
// product leaves the safe range.
Outcome wright_series(double lambda, double mu, double z, const SeriesControl& ctl) {
    double power = 1.0;  // z^k / k!
    bool log_mode = false;
    const double log_abs_z = std::log(std::abs(z));
    auto next = [&](int k) -> Term {
        if (k > 0 && !log_mode) {
            power *= z / k;
            if (std::abs(power) < 1e-280 || std::abs(power) > 1e280) log_mode = true;
        }
        const double arg = lambda * k + mu;
        if (is_nonpositive_integer(arg)) return {0.0, 0.0};
        if (!log_mode && std::abs(arg) < 150.0) {
            return {power * rgamma(arg), 2.0 * k + 8.0};
        }
        const SignedLog g = log_rgamma(arg);
        const double la = k * log_abs_z - std::lgamma(k + 1.0) + g.log_abs;
        const int sign = g.sign * ((z < 0.0 && k % 2 == 1) ? -1 : 1);
        return {sign * std::exp(la), 8.0 + std::abs(la) + std::abs(g.log_abs) + k};
    };
    if (z == 0.0) {
        return {{rgamma(mu), 0.0, 1}, true, {}};
    }
    return sum_series(next, ctl);
}

} // namespace

void SeriesControl::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_terms < 1) {
        throw DomainError("SeriesControl: need abs_tol > 0, rel_tol > 0, max_terms >= 1");
    }
}

double sinpi(double x) {
    if (x == std::floor(x)) return 0.0;
    const double r = x - 2.0 * std::round(0.5 * x);  // in [-1, 1]
    if (r == 0.5) return 1.0;
    if (r == -0.5) return -1.0;
    return std::sin(kPi * r);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x > 0.0) {
        if (x > 171.7) return 0.0;
        return 1.0 / std::tgamma(x);
    }
    if (x > -170.0) return 1.0 / std::tgamma(x);
    const SignedLog g = log_rgamma(x);
    return g.sign * std::exp(g.log_abs);
}

SignedLog log_rgamma(double x) {
    if (is_nonpositive_integer(x)) {
        return {-std::numeric_limits<double>::infinity(), 0};
    }
    int sg = 1;
    if (x > 0.0) {
        return {-::lgamma_r(x, &sg), 1};
    }
    // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
    const double s = sinpi(x);
    return {::lgamma_r(1.0 - x, &sg) + std::log(std::abs(s)) - std::log(kPi), s > 0.0 ? 1 : -1};
}

SpecialValue mittag_leffler(double alpha, double beta, double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!(alpha > 0.0)) throw DomainError("mittag_leffler: alpha must be positive");
    if (!(std::abs(z) <= kMittagLefflerCutoff)) {
        throw DomainError("mittag_leffler: |z| beyond the series cutoff 30");
    }
    if (z == 0.0) return {rgamma(beta), 0.0, 1};
    double power = 1.0;
    const double log_abs_z = std::log(std::abs(z));
    auto next = [&](int k) -> Term {
        if (k > 0) power *= z;
        const double arg = alpha * k + beta;
        if (is_nonpositive_integer(arg)) return {0.0, 0.0};
        if (arg < 150.0 && std::abs(power) < 1e280) {
            return {power * rgamma(arg), k + 8.0};
        }
        const SignedLog g = log_rgamma(arg);
        const double la = k * log_abs_z + g.log_abs;
        const int sign = g.sign * ((z < 0.0 && k % 2 == 1) ? -1 : 1);
        return {sign * std::exp(la), 8.0 + std::abs(la) + k};
    };
    return require(sum_series(next, ctl), "mittag_leffler");
}

SpecialValue wright(double lambda, double mu, double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!(lambda > -1.0)) throw DomainError("wright: lambda must exceed -1");
    return require(wright_series(lambda, mu, z, ctl), "wright");
}

std::optional<SpecialValue> try_wright(double lambda, double mu, double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!(lambda > -1.0)) throw DomainError("wright: lambda must exceed -1");
    const Outcome o = wright_series(lambda, mu, z, ctl);
    if (!o.ok) return std::nullopt;
    return o.sv;
}

SpecialValue bessel_i(double nu, double z, const SeriesControl& ctl) {
    ctl.validate();
    if (!(z >= 0.0)) throw DomainError("bessel_i: z must be non-negative");
    const bool integer_nu = nu == std::floor(nu);
    if (z == 0.0) {
        if (nu == 0.0) return {1.0, 0.0, 1};
        if (nu > 0.0 || integer_nu) return {0.0, 0.0, 1};
        throw DomainError("bessel_i: I_nu(0) is infinite for negative non-integer nu");
    }
    // The negative-integer case has I_{-n} = I_n; the series handles it through
    // the vanishing reciprocal gammas, but the prefactor (z/2)^nu is folded in
    // per term to keep things finite.
    const double q = 0.25 * z * z;
    const double log_half_z = std::log(0.5 * z);
    double power = std::pow(0.5 * z, nu);  // (z/2)^{2k+nu} / k!
    bool log_mode = !(std::isfinite(power) && power > 1e-280 && power < 1e280);
    auto next = [&](int k) -> Term {
        if (k > 0 && !log_mode) {
            power *= q / k;
            if (power < 1e-280 || power > 1e280) log_mode = true;
        }
        const double arg = k + nu + 1.0;
        if (is_nonpositive_integer(arg)) return {0.0, 0.0};
        if (!log_mode && std::abs(arg) < 150.0) return {power * rgamma(arg), 2.0 * k + 8.0};
        const SignedLog g = log_rgamma(arg);
        const double la = (2.0 * k + nu) * log_half_z - std::lgamma(k + 1.0) + g.log_abs;
        return {g.sign * std::exp(la), 8.0 + std::abs(la) + k};
    };
    return require(sum_series(next, ctl), "bessel_i");
}

namespace {

SpecialValue bessel_k_from_i(double nu, double z) {
    SeriesControl ctl;
    ctl.abs_tol = 1e-300;
    ctl.rel_tol = 1e-14;
    ctl.max_terms = 500;
    const SpecialValue im = bessel_i(-nu, z, ctl);
    const SpecialValue ip = bessel_i(nu, z, ctl);
    const double s = sinpi(nu);
    const double v = 0.5 * kPi * (im.value - ip.value) / s;
    const double err = 0.5 * kPi *
                       (im.error_estimate + ip.error_estimate +
                        4.0 * kEps * (std::abs(im.value) + std::abs(ip.value))) /
                       std::abs(s);
    return {v, err, im.terms_used + ip.terms_used};
}

SpecialValue bessel_k_integral(double nu, double z) {
    // K_nu(z) = e^{-z} int_0^inf exp(-z (cosh u - 1)) cosh(nu u) du.
    const double anu = std::abs(nu);
    double umax = 1.0;
    for (int i = 0; i < 6; ++i) umax = std::acosh(1.0 + (45.0 + anu * umax) / z);
    // cosh u - 1 = 2 sinh^2(u/2), without cancellation for the small u that matter at large z.
    auto g = [=](double u) {
        const double sh = std::sinh(0.5 * u);
        return std::exp(-2.0 * z * sh * sh + anu * u) * 0.5 * (1.0 + std::exp(-2.0 * anu * u));
    };
    quad::Tolerance tol;
    tol.abs_tol = 1e-300;
    tol.rel_tol = 1e-13;
    const quad::Result r = quad::integrate(g, 0.0, umax, tol);
    if (!r.converged) throw ConvergenceError("bessel_k: quadrature did not converge");
    const double scale = std::exp(-z);
    return {r.value * scale, (r.error + 4.0 * kEps * std::abs(r.value)) * scale, r.evaluations};
}

} // namespace

SpecialValue bessel_k(double nu, double z) {
    if (!(z > 0.0)) throw DomainError("bessel_k: z must be positive");
    const double anu = std::abs(nu);
    if (z > 2.0) return bessel_k_integral(anu, z);
    if (anu == std::floor(anu)) {
        constexpr double kShift = 1e-6;
        const SpecialValue lo = bessel_k_from_i(anu + kShift, z);
        const SpecialValue hi = bessel_k_from_i(anu == 0.0 ? -kShift : anu - kShift, z);
        // The average has an O(kShift^2) bias on top of the cancellation error,
        // which grows like 1/kShift.
        const double v = 0.5 * (lo.value + hi.value);
        return {v, 0.5 * (lo.error_estimate + hi.error_estimate) + kShift * kShift * std::abs(v),
                lo.terms_used + hi.terms_used};
    }
    return bessel_k_from_i(anu, z);
}

SpecialValue airy_ai(double z) {
    // Ai(z) = c1 f(z) - c2 g(z) with
    //   f = sum 3^k (1/3)_k z^{3k}/(3k)!,  g = sum 3^k (2/3)_k z^{3k+1}/(3k+1)!.
    const double c1 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0));
    const double c2 = 1.0 / (std::pow(3.0, 1.0 / 3.0) * std::tgamma(1.0 / 3.0));
    const double z3 = z * z * z;
    quad::CompensatedSum f, g;
    double tf = 1.0;
    double tg = z;
    double abs_sum = c1 + c2 * std::abs(z);
    f.add(tf);
    g.add(tg);
    int k = 0;
    for (k = 1; k < 500; ++k) {
        tf *= z3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= z3 / ((3.0 * k) * (3.0 * k + 1.0));
        f.add(tf);
        g.add(tg);
        const double contrib = c1 * std::abs(tf) + c2 * std::abs(tg);
        abs_sum += contrib;
        if (contrib <= 1e-18 * abs_sum && k > 2) break;
    }
    if (k >= 500) throw ConvergenceError("airy_ai: series did not converge");
    const double v = c1 * f.value() - c2 * g.value();
    const double err = 4.0 * kEps * abs_sum;
    const SeriesControl defaults;
    if (err > defaults.abs_tol + defaults.rel_tol * std::abs(v)) {
        throw ConvergenceError("airy_ai: cancellation in the Maclaurin series exceeds tolerance");
    }
    return {v, err, 2 * (k + 1)};
}

SpecialValue confluent_u(double a, double b, double z) {
    if (!(z > 0.0)) throw DomainError("confluent_u: z must be positive");
    if (a == 0.0) return {1.0, 0.0, 0};
    if (!(a > 0.0)) throw DomainError("confluent_u: integral representation needs a > 0");
    // With t = s/z: U = z^{-a}/Gamma(a) int_0^inf e^{-s} s^{a-1} (1 + s/z)^{b-a-1} ds.
    const double p = b - a - 1.0;
    auto f = [=](double s) {
        return std::exp(-s + (a - 1.0) * std::log(s) + p * std::log1p(s / z));
    };
    quad::Tolerance tol;
    tol.abs_tol = 1e-300;
    tol.rel_tol = 1e-13;
    // Near 0 the integrand in log s decays only like s^a.
    const quad::Result r = quad::integrate_log_scale(f, std::max(a, 1.0), tol, 4.0, std::max(64.0, 80.0 / a));
    if (!r.converged) throw ConvergenceError("confluent_u: quadrature did not converge");
    const double scale = std::exp(-a * std::log(z) - std::lgamma(a));
    return {r.value * scale, (r.error + 8.0 * kEps * std::abs(r.value)) * scale, r.evaluations};
}

SpecialValue whittaker_w(double kappa, double mu, double z) {
    if (!(z > 0.0)) throw DomainError("whittaker_w: z must be positive");
    const SpecialValue u = confluent_u(0.5 - kappa + mu, 2.0 * mu + 1.0, z);
    const double scale = std::exp((mu + 0.5) * std::log(z) - 0.5 * z);
    return {u.value * scale, u.error_estimate * scale, u.terms_used};
}

} // namespace fracho::specfun
