#include "fracho/fracops.hpp"

#include "fracho/error.hpp"
#include "fracho/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace fracho::fracops {

namespace {

bool integral(double v) { return v == std::floor(v); }

GridFunction like(const GridFunction& f) {
    GridFunction g;
    g.origin = f.origin;
    g.step = f.step;
    g.samples.assign(f.size(), 0.0);
    return g;
}

void require_fractional(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError(std::string(who) + ": order must lie in (0, 1)");
    }
}

// One application of d/dx (order == 1) or d^2/dx^2 (order == 2), second order
// everywhere.
std::vector<double> central(const std::vector<double>& f, double h, int order) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    if (order == 1) {
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    } else {
        const double h2 = h * h;
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    }
    return d;
}

} // namespace

FracOrder::FracOrder(double value) : value_(value) {
    const bool ok = (value > 0.0 && value <= 1.0) || (value >= 1.0 && integral(value));
    if (!ok) throw DomainError("FracOrder: order must lie in (0, 1] or be a positive integer");
}

bool FracOrder::is_integer() const noexcept { return value_ == std::floor(value_); }

int FracOrder::as_integer() const {
    if (!is_integer()) throw DomainError("FracOrder: not an integer order");
    return static_cast<int>(value_);
}

GridFunction::GridFunction(double step_, std::vector<double> samples_)
    : step(step_), samples(std::move(samples_)) {}

void GridFunction::validate() const {
    if (!(step > 0.0)) throw DomainError("GridFunction: step must be positive");
    if (samples.size() < 2) throw DomainError("GridFunction: need at least two samples");
    for (double v : samples) {
        if (!std::isfinite(v)) throw DomainError("GridFunction: non-finite sample");
    }
}

double phi_alpha(double alpha, double t) {
    if (alpha > 1.0 && integral(alpha)) {
        throw DomainError("phi_alpha: alpha = 2, 3, ... is excluded");
    }
    if (alpha == 1.0 || t <= 0.0) return 0.0;
    return std::pow(t, -alpha) * specfun::rgamma(1.0 - alpha);
}

std::vector<double> gl_weights(double alpha, std::size_t count) {
    std::vector<double> w(count);
    if (count == 0) return w;
    w[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k) {
        w[k] = w[k - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(k));
    }
    return w;
}

GridFunction rl_plus(const GridFunction& f, FracOrder alpha) {
    f.validate();
    if (alpha.is_integer() && alpha.value() > 1.0) return integer_deriv(f, alpha.as_integer());
    const double a = alpha.value();
    const std::size_t n = f.size();
    const std::vector<double> w = gl_weights(a, n);
    const double scale = std::pow(f.step, -a);
    GridFunction g = like(f);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k <= j; ++k) s += w[k] * f.samples[j - k];
        g.samples[j] = scale * s;
    }
    g.low_accuracy_front = 1;
    return g;
}

GridFunction rl_plus_second_order(const GridFunction& f, double alpha) {
    f.validate();
    require_fractional(alpha, "rl_plus_second_order");
    const std::size_t n = f.size();
    const std::vector<double> w = gl_weights(alpha, n + 1);
    std::vector<double> g(n + 1);
    g[0] = 0.5 * alpha * w[0];
    for (std::size_t k = 1; k <= n; ++k) g[k] = 0.5 * alpha * w[k] + (1.0 - 0.5 * alpha) * w[k - 1];
    const double scale = std::pow(f.step, -alpha);
    GridFunction out = like(f);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k <= j + 1; ++k) s += g[k] * f.samples[j + 1 - k];
        out.samples[j] = scale * s;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * f.samples[n - 1 - k];
    out.samples[n - 1] = scale * s;
    out.low_accuracy_front = 1;
    out.low_accuracy_back = 1;
    return out;
}

GridFunction rl_plus_with_powers(const GridFunction& regular, double alpha,
                                 const std::vector<PowerTerm>& terms) {
    GridFunction out = rl_plus_second_order(regular, alpha);
    for (const PowerTerm& term : terms) {
        if (!(term.exponent > -1.0)) {
            throw DomainError("rl_plus_with_powers: exponents must exceed -1");
        }
        // D^a x^p = Gamma(p+1)/Gamma(p+1-a) x^{p-a}; zero when p - a + 1 is a pole.
        const double c = term.coefficient * std::tgamma(term.exponent + 1.0) *
                         specfun::rgamma(term.exponent + 1.0 - alpha);
        if (c == 0.0) continue;
        for (std::size_t j = 1; j < out.size(); ++j) {
            out.samples[j] += c * std::pow(out.abscissa(j), term.exponent - alpha);
        }
    }
    return out;
}

GridFunction rl_minus(const GridFunction& f, FracOrder alpha, double tail_cutoff) {
    f.validate();
    if (alpha.is_integer()) {
        // Same stencil as the left derivative, so the sign law holds exactly.
        const int n = alpha.as_integer();
        GridFunction d = rl_plus(f, alpha);
        if (n % 2 == 1) {
            for (double& v : d.samples) v = -v;
        }
        return d;
    }
    const double last = f.abscissa(f.size() - 1);
    if (tail_cutoff > last + 0.5 * f.step) {
        throw DomainError("rl_minus: grid does not reach the tail cutoff");
    }
    std::size_t m = f.size();
    while (m > 2 && f.abscissa(m - 1) > tail_cutoff + 0.5 * f.step) --m;

    GridFunction out = like(f);
    double peak = 0.0;
    for (std::size_t i = 0; i < m; ++i) peak = std::max(peak, std::abs(f.samples[i]));
    if (std::abs(f.samples[m - 1]) >= 1e-8 * peak) {
        out.warnings.push_back("rl_minus: insufficient decay at the truncation point");
    }
    const double a = alpha.value();
    const std::vector<double> w = gl_weights(a, m);
    const double scale = std::pow(f.step, -a);
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; j + k < m; ++k) s += w[k] * f.samples[j + k];
        out.samples[j] = scale * s;
    }
    out.samples.resize(m);
    out.low_accuracy_back = 1;
    return out;
}

GridFunction caputo(const GridFunction& f, double alpha) {
    f.validate();
    require_fractional(alpha, "caputo");
    const std::size_t n = f.size();
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        b[k] = std::pow(kk + 1.0, 1.0 - alpha) - std::pow(kk, 1.0 - alpha);
    }
    const double scale = std::pow(f.step, -alpha) / std::tgamma(2.0 - alpha);
    GridFunction out = like(f);
    for (std::size_t j = 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < j; ++k) s += b[k] * (f.samples[j - k] - f.samples[j - k - 1]);
        out.samples[j] = scale * s;
    }
    out.low_accuracy_front = 1;
    return out;
}

GridFunction integer_deriv(const GridFunction& f, int n) {
    f.validate();
    if (n < 1) throw DomainError("integer_deriv: order must be a positive integer");
    if (f.size() < static_cast<std::size_t>(n) + 2 || f.size() < 4) {
        throw DomainError("integer_deriv: grid too short for the requested order");
    }
    std::vector<double> d = f.samples;
    for (int i = 0; i < n / 2; ++i) d = central(d, f.step, 2);
    if (n % 2 == 1) d = central(d, f.step, 1);
    GridFunction out = like(f);
    out.samples = std::move(d);
    out.low_accuracy_front = static_cast<std::size_t>(n);
    out.low_accuracy_back = static_cast<std::size_t>(n);
    return out;
}

} // namespace fracho::fracops
