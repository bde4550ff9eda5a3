#include "fracho/transforms.hpp"

#include "fracho/error.hpp"
#include "fracho/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

namespace fracho::transforms {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

quad::Tolerance to_quad(const QuadratureSpec& q) {
    quad::Tolerance t;
    t.abs_tol = q.abs_tol;
    t.rel_tol = q.rel_tol;
    t.max_subdivisions = q.max_subdivisions;
    return t;
}

void require(const quad::Result& r, const char* who) {
    if (!r.converged) throw ConvergenceError(std::string(who) + ": quadrature did not converge");
}

// Half-line integral of an integrand that decays (at any rate), truncated at
// T, 2T, 4T, ... once a new panel is negligible.
double half_line(const quad::Integrand& g, const QuadratureSpec& q, const char* who) {
    const quad::Tolerance tol = to_quad(q);
    double T = q.tail_cutoff;
    // Geometric breakpoints resolve integrable endpoint singularities at 0.
    std::vector<double> bp{0.0};
    for (int k = 24; k >= 0; --k) bp.push_back(std::ldexp(T, -k));
    quad::Result head = quad::integrate(g, bp, tol);
    require(head, who);
    quad::CompensatedSum total;
    total.add(head.value);
    for (int i = 0; i < 64; ++i) {
        quad::Result piece = quad::integrate(g, T, 2.0 * T, tol);
        require(piece, who);
        total.add(piece.value);
        T *= 2.0;
        if (std::abs(piece.value) <= std::max(q.abs_tol, q.rel_tol * std::abs(total.value())) &&
            piece.error <= q.abs_tol + q.rel_tol * std::abs(total.value())) {
            return total.value();
        }
    }
    throw ConvergenceError(std::string(who) + ": tail did not decay");
}

struct Contour {
    Complex lambda;
    Complex dlambda;
};

Contour talbot_node(double theta, double sigma, double r) {
    const double s = std::sin(theta);
    const double cot = std::cos(theta) / s;
    return {Complex(sigma + r * theta * cot, r * theta),
            Complex(r * (cot - theta / (s * s)), r)};
}

double talbot_scale(const ContourSpec& c, double x) {
    const double floor_r = 0.4 * c.node_count / x;
    return c.scale > 0.0 ? std::max(c.scale, floor_r) : floor_r;
}

struct TalbotSum {
    double value;
    double magnitude;  // sum of |terms| / M, for the rounding floor
    double residue;
};

TalbotSum talbot_estimate(const ComplexFunction& F, double x, double sigma, double r, int m) {
    quad::CompensatedSum sum;
    double mag = 0.0;
    double res = 0.0;
    for (int k = 0; k < m; ++k) {
        const double theta = (k + 0.5) * kPi / m;
        const Contour n = talbot_node(theta, sigma, r);
        const Complex ex = std::exp(n.lambda * x);
        if (std::abs(ex) == 0.0) continue;
        const Complex fv = F(n.lambda);
        const Complex term = ex * fv * n.dlambda;
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) {
            throw ConvergenceError("bromwich_invert: non-finite transform value on the contour");
        }
        sum.add(term.imag());
        mag += std::abs(term);
        const Complex fc = F(std::conj(n.lambda));
        res += std::abs(fc - std::conj(fv)) * std::abs(ex * n.dlambda);
    }
    return {sum.value() / m, mag / m, res / m};
}

Inversion talbot(const ComplexFunction& F, double x, const ContourSpec& c) {
    const double r = talbot_scale(c, x);
    int m = c.node_count;
    TalbotSum prev = talbot_estimate(F, x, c.shift, r, m);
    while (m < c.max_node_count) {
        m *= 2;
        const TalbotSum cur = talbot_estimate(F, x, c.shift, r, m);
        const double diff = std::abs(cur.value - prev.value);
        const double floor = 1e3 * kEps * cur.magnitude;
        if (diff <= std::max(c.rel_tol * std::abs(cur.value), floor)) {
            return {cur.value, std::max(diff, kEps * cur.magnitude), cur.residue, m};
        }
        prev = cur;
    }
    throw ConvergenceError("bromwich_invert: Talbot sum did not settle");
}

struct PanelSeries {
    Complex value;
    double error;
    int panels;
};

// int_0^inf g(zeta) d zeta for complex g whose phase rotates, by panels of
// phase width ~pi with epsilon-algorithm acceleration of the partial sums.
PanelSeries oscillatory_half_line(const std::function<Complex(double)>& g, const QuadratureSpec& q,
                                  const char* who) {
    const quad::Tolerance tol = to_quad(q);
    auto phase_rate = [&g](double z) {
        const double d = 1e-5 * std::max(1.0, z);
        const Complex c = g(z);
        if (std::abs(c) == 0.0) return 0.0;
        const Complex lo = g(std::max(0.0, z - d));
        const Complex hi = g(z + d);
        return ((hi - lo) / ((z + d - std::max(0.0, z - d)) * c)).imag();
    };
    std::vector<double> re_sums, im_sums;
    quad::CompensatedSum re, im;
    double a = 0.0;
    int quiet = 0;
    bool have_last = false;
    Complex last;
    constexpr int kMaxPanels = 4000;
    for (int p = 0; p < kMaxPanels; ++p) {
        const Complex ga = g(a);
        if (!(std::abs(ga) < 1e8)) throw ConvergenceError(std::string(who) + ": symbol grows without bound");
        const double rate = std::abs(phase_rate(a));
        const double cap = std::max(0.5, 0.5 * a);
        const double len = rate > 0.0 ? std::min(kPi / rate, cap) : cap;
        const double b = a + len;
        const quad::Result pr = quad::integrate([&g](double z) { return g(z).real(); }, a, b, tol);
        const quad::Result pi = quad::integrate([&g](double z) { return g(z).imag(); }, a, b, tol);
        require(pr, who);
        require(pi, who);
        re.add(pr.value);
        im.add(pi.value);
        re_sums.push_back(re.value());
        im_sums.push_back(im.value());
        a = b;

        const double target = std::max(q.abs_tol, q.rel_tol * std::abs(re.value()));
        const double amp = std::abs(g(a));
        if (std::abs(pr.value) + std::abs(pi.value) <= 0.01 * target && amp * len <= 0.01 * target) {
            if (++quiet >= 3) return {Complex(re.value(), im.value()), pr.error + pi.error, p + 1};
        } else {
            quiet = 0;
        }
        if (p >= 12 && p % 2 == 0) {
            const std::size_t keep = std::min<std::size_t>(re_sums.size(), 40);
            std::vector<double> rtail(re_sums.end() - keep, re_sums.end());
            std::vector<double> itail(im_sums.end() - keep, im_sums.end());
            const quad::Extrapolation er = quad::wynn_epsilon(rtail);
            const quad::Extrapolation ei = quad::wynn_epsilon(itail);
            // Two consecutive extrapolations must agree: a single small
            // error estimate can be accidental.
            const bool small = er.error <= 0.1 * target && ei.error <= 0.1 * target;
            const bool stable = std::abs(er.value - last.real()) <= 0.1 * target &&
                                std::abs(ei.value - last.imag()) <= 0.1 * target;
            if (small && stable && have_last) {
                return {Complex(er.value, ei.value), er.error + ei.error, p + 1};
            }
            have_last = small;
            last = Complex(er.value, ei.value);
        }
    }
    throw ConvergenceError(std::string(who) + ": oscillatory tail did not converge");
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 || !(tail_cutoff > 0.0)) {
        throw DomainError("QuadratureSpec: tolerances and tail_cutoff must be positive");
    }
}

void ContourSpec::validate() const {
    if (node_count < 8) throw DomainError("ContourSpec: node_count must be at least 8");
    if (method == ContourMethod::bromwich_line && !(shift > 0.0)) {
        throw DomainError("ContourSpec: the Bromwich line needs a positive abscissa");
    }
    if (!(rel_tol > 0.0) || max_node_count < node_count) {
        throw DomainError("ContourSpec: invalid refinement settings");
    }
}

double laplace(const RealFunction& f, double lambda, const QuadratureSpec& q) {
    q.validate();
    if (!(lambda > 0.0)) throw DomainError("laplace: lambda must be positive");
    auto g = [&](double t) {
        const double w = std::exp(-lambda * t);
        return w == 0.0 || t == 0.0 ? 0.0 : w * f(t);
    };
    return half_line(g, q, "laplace");
}

double double_laplace(const RealFunction2& f, double xi, double lambda, const QuadratureSpec& q) {
    q.validate();
    if (!(xi > 0.0) || !(lambda > 0.0)) throw DomainError("double_laplace: xi and lambda must be positive");
    QuadratureSpec inner = q;
    inner.abs_tol = 0.1 * q.abs_tol;
    inner.rel_tol = 0.1 * q.rel_tol;
    auto outer = [&](double t) {
        const double w = std::exp(-lambda * t);
        if (w == 0.0 || t == 0.0) return 0.0;
        return w * laplace([&](double x) { return f(x, t); }, xi, inner);
    };
    return half_line(outer, q, "double_laplace");
}

Inversion bromwich_invert_detailed(const ComplexFunction& F, double x, const ContourSpec& c) {
    c.validate();
    if (!(x > 0.0)) throw DomainError("bromwich_invert: x must be positive");
    Inversion out;
    if (c.method == ContourMethod::talbot) {
        out = talbot(F, x, c);
    } else {
        // f(x) = (e^{cx} / pi) int_0^inf Re[F(c + iy) e^{iyx}] dy.
        QuadratureSpec q;
        q.abs_tol = 1e-13;
        q.rel_tol = c.rel_tol;
        auto g = [&](double y) {
            const Complex lam(c.shift, y);
            return F(lam) * std::exp(Complex(0.0, y * x));
        };
        const PanelSeries s = oscillatory_half_line(g, q, "bromwich_invert");
        const double scale = std::exp(c.shift * x) / kPi;
        out.value = scale * s.value.real();
        out.error = scale * s.error;
        out.node_count = s.panels;
    }
    return out;
}

double bromwich_invert(const ComplexFunction& F, double x, const ContourSpec& c) {
    const Inversion r = bromwich_invert_detailed(F, x, c);
    if (r.imag_residue > 1e-8 * std::max(std::abs(r.value), std::numeric_limits<double>::min())) {
        throw ConvergenceError("bromwich_invert: transform is not real on the real axis");
    }
    return r.value;
}

double bromwich_invert_log(const ComplexFunction& logF, double x, const ContourSpec& c) {
    c.validate();
    if (!(x > 0.0)) throw DomainError("bromwich_invert_log: x must be positive");
    const double r = talbot_scale(c, x);
    auto estimate = [&](int m) {
        std::vector<Complex> psi(m), dl(m);
        double top = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < m; ++k) {
            const Contour n = talbot_node((k + 0.5) * kPi / m, c.shift, r);
            psi[k] = n.lambda * x + logF(n.lambda);
            dl[k] = n.dlambda;
            if (std::isfinite(psi[k].real())) top = std::max(top, psi[k].real());
        }
        quad::CompensatedSum sum;
        double mag = 0.0;
        for (int k = 0; k < m; ++k) {
            if (!std::isfinite(psi[k].real())) continue;
            const Complex term = std::exp(psi[k] - top) * dl[k];
            sum.add(term.imag());
            // Rounding in psi itself is eps |psi| in the exponent and phase.
            mag += std::abs(term) * std::max(1.0, std::abs(psi[k]));
        }
        return std::tuple<double, double, double>{top, sum.value() / m, mag / m};
    };
    int m = c.node_count;
    auto [top0, s0, mag0] = estimate(m);
    (void)mag0;
    while (m < c.max_node_count) {
        m *= 2;
        auto [top, s, mag] = estimate(m);
        const double prev = s0 * std::exp(top0 - top);
        const double diff = std::abs(s - prev);
        if (diff <= std::max(c.rel_tol * std::abs(s), 1e3 * kEps * mag)) {
            if (!(s > 0.0)) throw ConvergenceError("bromwich_invert_log: non-positive result");
            return top + std::log(s);
        }
        top0 = top;
        s0 = s;
    }
    throw ConvergenceError("bromwich_invert_log: Talbot sum did not settle");
}

FourierResult fourier_inverse_detailed(const ComplexFunction& symbol, double x, const QuadratureSpec& q) {
    q.validate();
    auto plus = [&](double z) { return std::exp(Complex(0.0, -z * x)) * symbol(Complex(z, 0.0)); };
    auto minus = [&](double z) { return std::exp(Complex(0.0, z * x)) * symbol(Complex(-z, 0.0)); };
    QuadratureSpec half = q;
    half.abs_tol = 0.5 * q.abs_tol;
    const PanelSeries a = oscillatory_half_line(plus, half, "fourier_inverse_osc");
    const PanelSeries b = oscillatory_half_line(minus, half, "fourier_inverse_osc");
    const Complex total = (a.value + b.value) / (2.0 * kPi);
    return {total.real(), total.imag(), (a.error + b.error) / (2.0 * kPi), a.panels + b.panels};
}

double fourier_inverse_osc(const ComplexFunction& symbol, double x, const QuadratureSpec& q) {
    const FourierResult r = fourier_inverse_detailed(symbol, x, q);
    if (std::abs(r.imag) > std::max({q.abs_tol, 1e-8 * std::abs(r.value), 10.0 * r.error})) {
        throw ConvergenceError("fourier_inverse_osc: imaginary part above tolerance");
    }
    return r.value;
}

} // namespace fracho::transforms
