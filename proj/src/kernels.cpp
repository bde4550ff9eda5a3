#include "fracho/kernels.hpp"

#include "fracho/error.hpp"
#include "fracho/quadrature.hpp"
#include "fracho/specfun.hpp"
#include "fracho/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace fracho::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_order(double nu, const char* who) {
    if (!(nu > 0.0 && nu < 1.0)) throw DomainError(std::string(who) + ": nu must lie in (0, 1)");
}

void require_time(double t, const char* who) {
    if (!(t > 0.0)) throw DomainError(std::string(who) + ": t must be positive");
}

KernelValue from_value(double v, Method m, double err) {
    return {v, m, err, v == 0.0 ? kNegInf : std::log(std::abs(v))};
}

KernelValue from_log(double log_abs, Method m, double rel_err) {
    const double v = std::exp(log_abs);
    return {v, m, rel_err * v, log_abs};
}

// log g(y) for the one-sided nu-stable density with Laplace transform
// e^{-lambda^nu}, from Zolotarev's integral
//   g(y) = nu / ((1-nu) pi) y^{-1/(1-nu)} int_0^pi a(phi) exp(-c a(phi)) dphi,
//   c = y^{-nu/(1-nu)},
//   a(phi) = (sin(nu phi) / sin phi)^{1/(1-nu)} sin((1-nu) phi) / sin(nu phi).
// a increases from a(0) = nu^{nu/(1-nu)} (1 - nu); the factor exp(-c a(0)) is
// pulled out so that far-tail values survive in log form.
struct LogValue {
    double log_abs;
    double rel_err;
};

// log(sin(u) / u), accurate for small u.
double log_sinc(double u) {
    if (std::abs(u) < 0.5) {
        const double u2 = u * u;
        // sin(u)/u - 1 by its Taylor series; enough terms for |u| < 0.5.
        const double m1 = -u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0 *
                                                                                 (1.0 - u2 / 110.0))));
        return std::log1p(m1);
    }
    return std::log(std::sin(u) / u);
}

LogValue log_stable_density(double nu, double y) {
    const double p = 1.0 / (1.0 - nu);
    const double c = std::exp(-nu * p * std::log(y));
    const double a0 = std::pow(nu, nu * p) * (1.0 - nu);
    // log(a(phi) / a(0)); small-phi behaviour is O(phi^2) and has to be exact
    // relative to that, since it gets multiplied by c.
    auto log_ratio = [=](double phi) {
        const double ln = log_sinc(nu * phi);
        return p * (ln - log_sinc(phi)) + log_sinc((1.0 - nu) * phi) - ln;
    };
    auto integrand = [&](double phi) {
        const double d = log_ratio(phi);
        if (!std::isfinite(d)) return 0.0;
        const double e = -c * a0 * std::expm1(d);
        return e < -745.0 ? 0.0 : a0 * std::exp(d + e);
    };
    if (c > 1e12) {
        // Laplace's method: log(a/a0) = nu phi^2 / 2 + O(phi^4), relative error O(1/c).
        const double integral = a0 * std::sqrt(kPi / (2.0 * c * a0 * nu));
        const double log_g = std::log(nu * p / kPi) - p * std::log(y) - c * a0 + std::log(integral);
        return {log_g, 10.0 / c + 1e-14 * (1.0 + std::abs(log_g))};
    }
    // The mass sits within O(1/sqrt c) of phi = 0 when c is large.
    std::vector<double> bp{0.0};
    double w = std::min(kPi, 0.25 / std::sqrt(c));
    while (w < kPi) {
        bp.push_back(w);
        w *= 2.0;
    }
    bp.push_back(kPi);
    quad::Tolerance tol;
    tol.abs_tol = 1e-300;
    tol.rel_tol = 1e-13;
    tol.max_subdivisions = 2000;
    const quad::Result r = quad::integrate(integrand, bp, tol);
    if (!r.converged || !(r.value > 0.0)) {
        throw ConvergenceError("stable density integral did not converge");
    }
    const double log_g = std::log(nu * p / kPi) - p * std::log(y) - c * a0 + std::log(r.value);
    return {log_g, r.error / r.value + 1e-14 * (1.0 + std::abs(log_g))};
}

// l_nu(x, t) from the stable density: l_nu(x, t) = (t / (nu x)) h_nu(t, x) and
// h_nu(t, x) = x^{-1/nu} g(t x^{-1/nu}).
KernelValue l_from_stable(double nu, double x, double t) {
    const double log_y = std::log(t) - std::log(x) / nu;
    const LogValue g = log_stable_density(nu, std::exp(log_y));
    const double log_l = std::log(t / (nu * x)) - std::log(x) / nu + g.log_abs;
    return from_log(log_l, Method::quadrature, g.rel_err);
}

quad::Tolerance composition_tolerance() {
    quad::Tolerance tol;
    tol.abs_tol = 1e-300;
    tol.rel_tol = 1e-11;
    tol.max_subdivisions = 400;
    return tol;
}

KernelValue integrate_composition(const quad::Integrand& f, double center, const char* who) {
    const quad::Result r = quad::integrate_log_scale(f, center, composition_tolerance(), 5.0, 160.0);
    if (!r.converged) throw ConvergenceError(std::string(who) + ": quadrature did not converge");
    return from_value(r.value, Method::quadrature, r.error);
}

} // namespace

KernelSpec KernelSpec::h(double nu) { KernelSpec s; s.kind = KernelKind::H; s.nu = nu; return s; }
KernelSpec KernelSpec::l(double nu) { KernelSpec s; s.kind = KernelKind::L; s.nu = nu; return s; }
KernelSpec KernelSpec::lamperti(double nu) {
    KernelSpec s;
    s.kind = KernelKind::LAMPERTI;
    s.nu = nu;
    return s;
}
KernelSpec KernelSpec::compose(double nu1, double nu2) {
    KernelSpec s;
    s.kind = KernelKind::COMPOSE;
    s.nu1 = nu1;
    s.nu2 = nu2;
    return s;
}
KernelSpec KernelSpec::u_mn(int m, int n) {
    KernelSpec s;
    s.kind = KernelKind::U_MN;
    s.m = m;
    s.n = n;
    return s;
}
KernelSpec KernelSpec::pseudo(int n, int kappa) {
    KernelSpec s;
    s.kind = KernelKind::PSEUDO;
    s.n = n;
    s.kappa = kappa;
    return s;
}
KernelSpec KernelSpec::closed(KernelKind which) { KernelSpec s; s.kind = which; return s; }
KernelSpec KernelSpec::folded_stable(double alpha) {
    KernelSpec s;
    s.kind = KernelKind::FOLDED_STABLE;
    s.alpha = alpha;
    return s;
}

void KernelSpec::validate() const {
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    switch (kind) {
    case KernelKind::H:
    case KernelKind::L:
    case KernelKind::LAMPERTI:
        if (!open_unit(nu)) throw DomainError("kernel: nu must lie in (0, 1)");
        break;
    case KernelKind::COMPOSE:
        if (!open_unit(nu1) || !open_unit(nu2)) throw DomainError("kernel: nu1, nu2 must lie in (0, 1)");
        break;
    case KernelKind::U_MN:
        if (m < 1 || n < 1 || (m == 1 && n == 1)) throw DomainError("kernel: u_mn needs m, n >= 1, not both 1");
        break;
    case KernelKind::PSEUDO:
        if (n < 2) throw DomainError("kernel: pseudo needs n >= 2");
        if (kappa != 1 && kappa != -1) throw DomainError("kernel: kappa must be +1 or -1");
        if (n % 2 == 0) {
            const int p = n / 2;
            const int forced = (p % 2 == 1) ? 1 : -1;  // (-1)^{p+1}
            if (kappa != forced) throw DomainError("kernel: even n = 2p requires kappa = (-1)^{p+1}");
        }
        break;
    case KernelKind::FOLDED_STABLE:
        if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("kernel: alpha must lie in (0, 2]");
        break;
    case KernelKind::U1:
    case KernelKind::U2:
    case KernelKind::U3:
        break;
    }
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os.precision(6);
    switch (kind) {
    case KernelKind::H: os << "h(nu=" << nu << ")"; break;
    case KernelKind::L: os << "l(nu=" << nu << ")"; break;
    case KernelKind::LAMPERTI: os << "lamperti(nu=" << nu << ")"; break;
    case KernelKind::COMPOSE: os << "compose(nu1=" << nu1 << ",nu2=" << nu2 << ")"; break;
    case KernelKind::U_MN: os << "u_mn(m=" << m << ",n=" << n << ")"; break;
    case KernelKind::PSEUDO: os << "pseudo(n=" << n << ",kappa=" << kappa << ")"; break;
    case KernelKind::U1: os << "u1"; break;
    case KernelKind::U2: os << "u2"; break;
    case KernelKind::U3: os << "u3"; break;
    case KernelKind::FOLDED_STABLE: os << "folded_stable(alpha=" << alpha << ")"; break;
    }
    return os.str();
}

const char* method_name(Method m) {
    switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::series: return "series";
    case Method::quadrature: return "quadrature";
    }
    return "?";
}

KernelValue l_density(double nu, double x, double t) {
    require_order(nu, "l_density");
    require_time(t, "l_density");
    if (!(x >= 0.0)) throw DomainError("l_density: x must be non-negative");
    if (x == 0.0) {
        const double v = std::pow(t, -nu) * specfun::rgamma(1.0 - nu);
        return from_value(v, Method::closed_form, 0.0);
    }
    const double scale = std::pow(t, -nu);
    const double z = x * scale;
    // Past z ~ 12 the alternating series has lost most digits for every order
    // of interest; skip straight to the integral there.
    if (z < 12.0) {
        specfun::SeriesControl ctl;
        ctl.abs_tol = 1e-300;
        ctl.rel_tol = 1e-13;
        ctl.max_terms = 600;
        if (auto w = specfun::try_wright(-nu, 1.0 - nu, -z, ctl); w && w->value > 0.0) {
            return from_value(scale * w->value, Method::series, scale * w->error_estimate);
        }
    }
    return l_from_stable(nu, x, t);
}

KernelValue h_density(double nu, double x, double t) {
    require_order(nu, "h_density");
    require_time(t, "h_density");
    if (!(x >= 0.0)) throw DomainError("h_density: x must be non-negative");
    if (x == 0.0) return {0.0, Method::closed_form, 0.0, kNegInf};
    const KernelValue l = l_density(nu, t, x);
    const double f = nu * t / x;
    return {f * l.value, l.method, f * l.error_estimate, std::log(f) + l.log_abs};
}

std::complex<double> levy_exponent(double nu, double xi) {
    if (xi == 0.0) return {0.0, 0.0};
    const double mod = std::pow(std::abs(xi), nu);
    const double arg = -0.5 * kPi * nu * (xi > 0.0 ? 1.0 : -1.0);
    return std::polar(mod, arg);
}

KernelValue lamperti(double nu, double x) {
    require_order(nu, "lamperti");
    if (!(x > 0.0)) throw DomainError("lamperti: x must be positive");
    const double xn = std::pow(x, nu);
    const double v = std::pow(x, nu - 1.0) * std::sin(kPi * nu) /
                     (kPi * (1.0 + 2.0 * xn * std::cos(kPi * nu) + xn * xn));
    return from_value(v, Method::closed_form, 0.0);
}

KernelValue compose_density(double nu1, double nu2, double x, double t) {
    require_order(nu1, "compose_density");
    require_order(nu2, "compose_density");
    require_time(t, "compose_density");
    if (!(x >= 0.0)) throw DomainError("compose_density: x must be non-negative");
    if (x == 0.0) return {0.0, Method::closed_form, 0.0, kNegInf};
    auto f = [=](double s) { return h_density(nu2, x, s).value * l_density(nu1, s, t).value; };
    // h_{nu2}(x, .) lives near s ~ x^{nu2}, l_{nu1}(., t) near s ~ t^{nu1}.
    const double center = std::sqrt(std::pow(x, nu2) * std::pow(t, nu1));
    return integrate_composition(f, center, "compose_density");
}

KernelValue u_mn(int m, int n, double x, double t) {
    require_time(t, "u_mn");
    if (m < 1 || n < 1 || (m == 1 && n == 1)) throw DomainError("u_mn: need m, n >= 1, not both 1");
    if (!(x >= 0.0)) throw DomainError("u_mn: x must be non-negative");
    if (n == 1) return l_density(1.0 / m, x, t);
    if (m == 1) return h_density(1.0 / n, x, t);
    const double a = 1.0 / m;
    const double b = 1.0 / n;
    auto f = [=](double s) { return l_density(a, x, s).value * h_density(b, s, t).value; };
    // l_{1/m}(x, .) lives near s ~ x^m, h_{1/n}(., t) near s ~ t^n.
    const double center = x > 0.0 ? std::sqrt(std::pow(x, m) * std::pow(t, n)) : std::pow(t, n);
    return integrate_composition(f, center, "u_mn");
}

KernelValue folded_stable(double alpha, double x, double t) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("folded_stable: alpha must lie in (0, 2]");
    require_time(t, "folded_stable");
    if (!(x >= 0.0)) throw DomainError("folded_stable: x must be non-negative");
    transforms::QuadratureSpec q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-11;
    auto symbol = [=](std::complex<double> z) {
        return std::complex<double>(std::exp(-t * std::pow(std::abs(z.real()), alpha)), 0.0);
    };
    const transforms::FourierResult r = transforms::fourier_inverse_detailed(symbol, x, q);
    return from_value(2.0 * r.value, Method::quadrature, 2.0 * r.error);
}

KernelValue pseudo_kernel(int n, int kappa, double x, double t) {
    KernelSpec::pseudo(n, kappa).validate();
    require_time(t, "pseudo_kernel");
    transforms::QuadratureSpec q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-10;
    auto symbol = [=](std::complex<double> z) {
        const std::complex<double> w = std::pow(std::complex<double>(0.0, -z.real()), n);
        return std::exp(static_cast<double>(kappa) * t * w);
    };
    const transforms::FourierResult r = transforms::fourier_inverse_detailed(symbol, x, q);
    if (std::abs(r.imag) > std::max({1e-8 * std::abs(r.value), q.abs_tol, 10.0 * r.error})) {
        throw ConvergenceError("pseudo_kernel: imaginary residue above tolerance");
    }
    return from_value(r.value, Method::quadrature, r.error);
}

KernelValue u_closed(ClosedForm which, double x, double t) {
    if (!(x > 0.0) || !(t > 0.0)) throw DomainError("u_closed: x and t must be positive");
    switch (which) {
    case ClosedForm::U1: {
        const double arg = 2.0 / std::pow(3.0, 1.5) * std::pow(x, 1.5) / std::sqrt(t);
        const specfun::SpecialValue k = specfun::bessel_k(1.0 / 3.0, arg);
        const double f = std::sqrt(x / t) / kPi;
        return from_value(f * k.value, Method::closed_form, f * k.error_estimate);
    }
    case ClosedForm::U2: {
        const double q = x * x * x / (27.0 * t * t);
        const specfun::SpecialValue w = specfun::whittaker_w(-0.5, 1.0 / 6.0, 2.0 * q);
        const double f = 0.25 * std::sqrt(3.0 / (x * kPi)) * std::exp(q);
        return from_value(f * w.value, Method::closed_form, f * w.error_estimate);
    }
    case ClosedForm::U3: {
        const double v = 2.0 * t / (std::pow(3.0, 1.5) * kPi * (x * x + x * t + t * t));
        return from_value(v, Method::closed_form, 0.0);
    }
    }
    throw DomainError("u_closed: unknown form");
}

KernelValue u2_subordinated(double x, double t) {
    if (!(x > 0.0) || !(t > 0.0)) throw DomainError("u2_subordinated: x and t must be positive");
    const double q = x * x * x / (27.0 * t * t);
    const specfun::SpecialValue w = specfun::whittaker_w(-0.5, 1.0 / 6.0, 4.0 * q);
    const double f = std::sqrt(3.0) / (2.0 * std::sqrt(kPi) * x) * std::exp(2.0 * q);
    return from_value(f * w.value, Method::closed_form, f * w.error_estimate);
}

namespace {

// sum_k w_k a(x_i, s_k) b(s_k, t_j) over a trapezoidal rule in y = ln s.
// The rule starts on the span of the given centres and is extended outward
// one unit of y at a time until both the new nodes contribute below 1e-18 of
// the running peak.
template <class A, class B>
GridValues shared_rule_composition(const std::vector<double>& xs, const std::vector<double>& ts,
                                   double y_lo, double y_hi, A&& a, B&& b) {
    constexpr double kStep = 0.05;
    constexpr int kPerUnit = 20;
    const std::size_t nx = xs.size();
    const std::size_t nt = ts.size();
    GridValues out{xs, ts, std::vector<double>(nx * nt, 0.0)};
    std::vector<double> acol(nx), brow(nt);
    double peak = 0.0;
    // Returns max |contribution| of the node.
    auto add_node = [&](double y) {
        const double s = std::exp(y);
        double amax = 0.0, bmax = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            acol[i] = a(xs[i], s);
            amax = std::max(amax, std::abs(acol[i]));
        }
        if (amax == 0.0) return 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            brow[j] = b(s, ts[j]);
            bmax = std::max(bmax, std::abs(brow[j]));
        }
        const double w = kStep * s;
        for (std::size_t j = 0; j < nt; ++j) {
            const double bj = w * brow[j];
            if (bj == 0.0) continue;
            double* row = &out.values[j * nx];
            for (std::size_t i = 0; i < nx; ++i) row[i] += acol[i] * bj;
        }
        const double mag = w * amax * bmax;
        peak = std::max(peak, mag);
        return mag;
    };
    const long k_lo = static_cast<long>(std::floor(y_lo / kStep));
    const long k_hi = static_cast<long>(std::ceil(y_hi / kStep));
    for (long k = k_lo; k <= k_hi; ++k) add_node(k * kStep);
    for (long k = k_hi + 1;; k += kPerUnit) {
        double block = 0.0;
        for (long q = k; q < k + kPerUnit; ++q) block = std::max(block, add_node(q * kStep));
        if (block <= 1e-18 * peak) break;
        if (k - k_hi > 400 * kPerUnit) throw ConvergenceError("shared-rule composition: upper tail");
    }
    for (long k = k_lo - 1;; k -= kPerUnit) {
        double block = 0.0;
        for (long q = k; q > k - kPerUnit; --q) block = std::max(block, add_node(q * kStep));
        if (block <= 1e-18 * peak) break;
        if (k_lo - k > 400 * kPerUnit) throw ConvergenceError("shared-rule composition: lower tail");
    }
    return out;
}

std::pair<double, double> log_span(const std::vector<double>& v, double power) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v) {
        if (x > 0.0) {
            lo = std::min(lo, power * std::log(x));
            hi = std::max(hi, power * std::log(x));
        }
    }
    if (lo > hi) lo = hi = 0.0;
    return {lo, hi};
}

} // namespace

GridValues compose_grid(double nu1, double nu2, const std::vector<double>& xs,
                        const std::vector<double>& ts) {
    require_order(nu1, "compose_grid");
    require_order(nu2, "compose_grid");
    for (double x : xs) if (!(x >= 0.0)) throw DomainError("compose_grid: x must be non-negative");
    for (double t : ts) if (!(t >= 0.0)) throw DomainError("compose_grid: t must be non-negative");
    const auto [xl, xh] = log_span(xs, nu2);
    const auto [tl, th] = log_span(ts, nu1);
    auto a = [=](double x, double s) { return x > 0.0 ? h_density(nu2, x, s).value : 0.0; };
    auto b = [=](double s, double t) { return t > 0.0 ? l_density(nu1, s, t).value : 0.0; };
    return shared_rule_composition(xs, ts, std::min(xl, tl), std::max(xh, th), a, b);
}

GridValues u_mn_grid(int m, int n, const std::vector<double>& xs, const std::vector<double>& ts) {
    if (m < 2 || n < 2) throw DomainError("u_mn_grid: needs m, n >= 2");
    for (double x : xs) if (!(x >= 0.0)) throw DomainError("u_mn_grid: x must be non-negative");
    for (double t : ts) if (!(t > 0.0)) throw DomainError("u_mn_grid: t must be positive");
    const double am = 1.0 / m;
    const double bn = 1.0 / n;
    const auto [xl, xh] = log_span(xs, m);
    const auto [tl, th] = log_span(ts, n);
    auto a = [=](double x, double s) { return l_density(am, x, s).value; };
    auto b = [=](double s, double t) { return h_density(bn, s, t).value; };
    return shared_rule_composition(xs, ts, std::min(xl, tl), std::max(xh, th), a, b);
}

KernelValue evaluate(const KernelSpec& spec, double x, double t) {
    spec.validate();
    switch (spec.kind) {
    case KernelKind::H: return h_density(spec.nu, x, t);
    case KernelKind::L: return l_density(spec.nu, x, t);
    case KernelKind::LAMPERTI: {
        require_time(t, "lamperti");
        KernelValue v = lamperti(spec.nu, x / t);
        v.value /= t;
        v.log_abs -= std::log(t);
        return v;
    }
    case KernelKind::COMPOSE: return compose_density(spec.nu1, spec.nu2, x, t);
    case KernelKind::U_MN: return u_mn(spec.m, spec.n, x, t);
    case KernelKind::PSEUDO: return pseudo_kernel(spec.n, spec.kappa, x, t);
    case KernelKind::U1: return u_closed(ClosedForm::U1, x, t);
    case KernelKind::U2: return u_closed(ClosedForm::U2, x, t);
    case KernelKind::U3: return u_closed(ClosedForm::U3, x, t);
    case KernelKind::FOLDED_STABLE: return folded_stable(spec.alpha, x, t);
    }
    throw DomainError("evaluate: unknown kernel");
}

KernelValue symmetric_extension(const KernelSpec& spec, double x, double t) {
    if (spec.kind != KernelKind::L && spec.kind != KernelKind::U_MN) {
        throw DomainError("symmetric_extension: only L and U_MN kernels are extended");
    }
    return evaluate(spec, std::abs(x), t);
}

} // namespace fracho::kernels
