#include "fracho/verify.hpp"

#include "fracho/error.hpp"
#include "fracho/fracops.hpp"
#include "fracho/kernels.hpp"
#include "fracho/quadrature.hpp"
#include "fracho/specfun.hpp"
#include "fracho/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

namespace fracho::verify {

namespace {

using fracops::GridFunction;
using kernels::GridValues;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* pattern, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

std::string fmt(const char* pattern, double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// ---------------------------------------------------------------------------
// Equation layout

enum class Op { integer, left_rl, caputo };

struct Term {
    double coefficient;
    bool along_x;
    Op op;
    double order;
    /// D^a_x applied after removing the x -> 0 power singularity of the
    /// composed density.
    bool subtract_powers = false;
};

struct Layout {
    std::vector<Term> terms;
    bool x_from_zero = false;
    bool t_from_zero = false;
    int x_margin = 0;  // extra local samples beyond each side
    int t_margin = 0;
};

Layout layout_of(const EquationSpec& eq) {
    Layout L;
    auto integer = [](double c, bool x, int n) { return Term{c, x, Op::integer, double(n)}; };
    auto left = [](double c, bool x, double a) { return Term{c, x, Op::left_rl, a}; };
    const double sign_n = (eq.n % 2 == 0) ? 1.0 : -1.0;
    const double sign_m = (eq.m % 2 == 0) ? 1.0 : -1.0;
    switch (eq.id) {
    case EquationId::PDE_H:
        L.terms = {integer(1.0, false, 1), left(1.0, true, eq.nu)};
        break;
    case EquationId::PDE_L:
        L.terms = {left(1.0, false, eq.nu), integer(1.0, true, 1)};
        break;
    case EquationId::PDE_COMPOSE: {
        Term t{1.0, false, eq.caputo_form ? Op::caputo : Op::left_rl, eq.nu1};
        Term x{1.0, true, Op::left_rl, eq.nu2, true};
        L.terms = {t, x};
        break;
    }
    case EquationId::THM_L:
    case EquationId::CORO_L: {
        const double nu = eq.id == EquationId::CORO_L ? 1.0 : eq.nu;
        L.terms = {integer(sign_n, true, eq.n),
                   nu == 1.0 ? integer(-1.0, false, 1) : left(-1.0, false, nu)};
        break;
    }
    case EquationId::THM_H:
    case EquationId::CORO_H: {
        const double nu = eq.id == EquationId::CORO_H ? 1.0 : eq.nu;
        L.terms = {integer(sign_n, false, eq.n),
                   nu == 1.0 ? integer(-1.0, true, 1) : left(-1.0, true, nu)};
        break;
    }
    case EquationId::PDE_PSEUDO:
        L.terms = {integer(1.0, false, 1), integer(-double(eq.kappa), true, eq.n)};
        break;
    case EquationId::PDE_UMN:
        L.terms = {integer(sign_n, false, eq.n), integer(sign_m, true, eq.m)};
        break;
    }
    for (const Term& term : L.terms) {
        const bool nonlocal = term.op != Op::integer;
        if (term.along_x) {
            if (nonlocal) L.x_from_zero = true;
            else L.x_margin = std::max(L.x_margin, int(term.order));
        } else {
            if (nonlocal) L.t_from_zero = true;
            else L.t_margin = std::max(L.t_margin, int(term.order));
        }
    }
    return L;
}

struct Axis {
    double origin = 0.0;
    double step = 0.0;
    std::size_t count = 0;
    double lo = 0.0, hi = 0.0;  // residual range

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = origin + step * double(i);
        return v;
    }
    bool inside(std::size_t i) const {
        const double a = origin + step * double(i);
        const double slack = 1e-9 * step;
        return a >= lo - slack && a <= hi + slack;
    }
};

Axis make_axis(double lo, double hi, double step, bool from_zero, int margin) {
    Axis a;
    a.step = step;
    a.lo = lo;
    a.hi = hi;
    const double cells = std::ceil((hi - lo) / step - 1e-9);
    if (from_zero) {
        // Two samples beyond hi: the shifted Grunwald formula needs a right
        // neighbour and its last point is first order.
        a.origin = 0.0;
        a.count = std::size_t(std::ceil(hi / step - 1e-9)) + 3;
    } else {
        a.origin = lo - margin * step;
        a.count = std::size_t(cells) + 1 + 2 * std::size_t(margin);
    }
    return a;
}

// ---------------------------------------------------------------------------
// Kernel sampling

GridValues sample_pointwise(const std::vector<double>& xs, const std::vector<double>& ts,
                            const std::function<double(double, double)>& k) {
    GridValues g{xs, ts, std::vector<double>(xs.size() * ts.size())};
    parallel_for(ts.size(), [&](std::size_t j) {
        for (std::size_t i = 0; i < xs.size(); ++i) g.values[j * xs.size() + i] = k(xs[i], ts[j]);
    });
    return g;
}

double l_or_zero(double nu, double x, double t) {
    if (t <= 0.0) return 0.0;  // l(x, 0) is a point mass at x = 0
    return kernels::l_density(nu, x, t).value;
}

double h_or_zero(double nu, double x, double t) {
    if (t <= 0.0 || x <= 0.0) return 0.0;
    return kernels::h_density(nu, x, t).value;
}

GridValues sample(const EquationSpec& eq, const std::vector<double>& xs,
                  const std::vector<double>& ts) {
    switch (eq.id) {
    case EquationId::PDE_H:
        return sample_pointwise(xs, ts, [nu = eq.nu](double x, double t) { return h_or_zero(nu, x, t); });
    case EquationId::PDE_L:
        return sample_pointwise(xs, ts, [nu = eq.nu](double x, double t) { return l_or_zero(nu, x, t); });
    case EquationId::THM_L:
    case EquationId::CORO_L: {
        const double nu = (eq.id == EquationId::CORO_L ? 1.0 : eq.nu) / eq.n;
        return sample_pointwise(xs, ts, [nu](double x, double t) { return l_or_zero(nu, x, t); });
    }
    case EquationId::THM_H:
    case EquationId::CORO_H: {
        const double nu = (eq.id == EquationId::CORO_H ? 1.0 : eq.nu) / eq.n;
        return sample_pointwise(xs, ts, [nu](double x, double t) { return h_or_zero(nu, x, t); });
    }
    case EquationId::PDE_COMPOSE:
        return kernels::compose_grid(eq.nu1, eq.nu2, xs, ts);
    case EquationId::PDE_PSEUDO:
        return sample_pointwise(xs, ts, [n = eq.n, k = eq.kappa](double x, double t) {
            return kernels::pseudo_kernel(n, k, x, t).value;
        });
    case EquationId::PDE_UMN:
        return kernels::u_mn_grid(eq.m, eq.n, xs, ts);
    }
    throw DomainError("sample: unknown equation");
}

// Coefficients of the x -> 0 expansion f ~ sum_k c_k(t) x^{k nu2 - 1} of the
// composed density, from the large-argument expansion of its x-Laplace
// transform E_{nu1}(-xi^{nu2} t^{nu1}).
double singular_coefficient(int k, double nu1, double nu2, double t) {
    return ((k % 2 == 1) ? 1.0 : -1.0) * std::pow(t, -k * nu1) * specfun::rgamma(1.0 - k * nu1) *
           specfun::rgamma(k * nu2);
}

std::vector<double> apply_line(const Term& term, const std::vector<double>& f, const Axis& axis,
                               const EquationSpec& eq, double other) {
    GridFunction g(axis.step, f);
    g.origin = axis.origin;
    switch (term.op) {
    case Op::integer:
        return fracops::integer_deriv(g, int(term.order)).samples;
    case Op::caputo:
        return fracops::caputo(g, term.order).samples;
    case Op::left_rl:
        break;
    }
    if (!term.subtract_powers) return fracops::rl_plus_second_order(g, term.order).samples;

    // Composed density along x at fixed t = other: split off the terms
    // c_k x^{k nu2 - 1} with k nu2 < 1; a k nu2 = 1 term is the limit at 0.
    const double t = other;
    std::vector<fracops::PowerTerm> powers;
    double at_zero = 0.0;
    if (t > 0.0) {
        for (int k = 1; k * eq.nu2 <= 1.0 + 1e-12; ++k) {
            const double c = singular_coefficient(k, eq.nu1, eq.nu2, t);
            if (std::abs(k * eq.nu2 - 1.0) < 1e-12) {
                at_zero = c;
            } else if (c != 0.0) {
                powers.push_back({c, k * eq.nu2 - 1.0});
            }
        }
    }
    GridFunction regular = g;
    regular.samples[0] = at_zero;
    for (std::size_t i = 1; i < regular.size(); ++i) {
        const double x = regular.abscissa(i);
        for (const auto& p : powers) regular.samples[i] -= p.coefficient * std::pow(x, p.exponent);
    }
    return fracops::rl_plus_with_powers(regular, term.order, powers).samples;
}

struct LevelResult {
    double max_abs = 0.0;
    double rms = 0.0;
};

LevelResult residual_level(const EquationSpec& eq, double hx, double ht) {
    const Layout L = layout_of(eq);
    const Axis ax = make_axis(eq.grid.x0, eq.grid.x1, hx, L.x_from_zero, L.x_margin);
    const Axis at = make_axis(eq.grid.t0, eq.grid.t1, ht, L.t_from_zero, L.t_margin);
    const std::vector<double> xs = ax.values();
    const std::vector<double> ts = at.values();
    if (xs.front() < 0.0 && eq.id != EquationId::PDE_PSEUDO) {
        throw DomainError("residual: grid margin reaches x < 0");
    }
    if (ts.front() < 0.0 || (!L.t_from_zero && ts.front() <= 0.0)) {
        throw DomainError("residual: grid margin reaches t <= 0");
    }
    const GridValues K = sample(eq, xs, ts);
    const std::size_t nx = xs.size();
    const std::size_t nt = ts.size();
    std::vector<double> R(nx * nt, 0.0);
    for (const Term& term : L.terms) {
        if (term.along_x) {
            std::vector<double> row(nx);
            for (std::size_t j = 0; j < nt; ++j) {
                if (!at.inside(j)) continue;
                for (std::size_t i = 0; i < nx; ++i) row[i] = K.at(i, j);
                const std::vector<double> d = apply_line(term, row, ax, eq, ts[j]);
                for (std::size_t i = 0; i < nx; ++i) R[j * nx + i] += term.coefficient * d[i];
            }
        } else {
            std::vector<double> col(nt);
            for (std::size_t i = 0; i < nx; ++i) {
                if (!ax.inside(i)) continue;
                for (std::size_t j = 0; j < nt; ++j) col[j] = K.at(i, j);
                const std::vector<double> d = apply_line(term, col, at, eq, xs[i]);
                for (std::size_t j = 0; j < nt; ++j) R[j * nx + i] += term.coefficient * d[j];
            }
        }
    }
    LevelResult out;
    double sum2 = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < nt; ++j) {
        if (!at.inside(j)) continue;
        for (std::size_t i = 0; i < nx; ++i) {
            if (!ax.inside(i)) continue;
            const double r = R[j * nx + i];
            out.max_abs = std::max(out.max_abs, std::abs(r));
            sum2 += r * r;
            ++count;
        }
    }
    if (count == 0) throw DomainError("residual: empty interior");
    out.rms = std::sqrt(sum2 / double(count));
    return out;
}

// ---------------------------------------------------------------------------
// Limits

struct Limit {
    double value;
    double change;  // last diagonal step of the Richardson table
};

// Samples g(delta_j), delta_j = delta_0 2^{-j}, with g = L + a_1 delta^p + a_2 delta^{2p} + ...
Limit richardson(const std::vector<double>& g, int p) {
    std::vector<std::vector<double>> T(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        T[j].push_back(g[j]);
        for (std::size_t m = 1; m <= j; ++m) {
            const double f = std::pow(2.0, double(p) * double(m)) - 1.0;
            T[j].push_back(T[j][m - 1] + (T[j][m - 1] - T[j - 1][m - 1]) / f);
        }
    }
    const auto& last = T.back();
    const double change = last.size() >= 2 ? std::abs(last.back() - T[T.size() - 2].back()) : kNaN;
    return {last.back(), change};
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
    return b;
}

// (-1)^k d^k f at 0+, from forward differences on delta, 2 delta, ..., (k+1) delta.
Limit right_derivative_at_zero(const std::function<double(double)>& f, int k, double delta0) {
    std::vector<double> g;
    for (int j = 0; j <= 4; ++j) {
        const double d = delta0 * std::pow(2.0, -j);
        double s = 0.0;
        for (int i = 0; i <= k; ++i) {
            s += (((k - i) % 2 == 0) ? 1.0 : -1.0) * binomial(k, i) * f(double(i + 1) * d);
        }
        g.push_back(((k % 2 == 0) ? 1.0 : -1.0) * s / std::pow(d, k));
    }
    return richardson(g, 1);
}

} // namespace

// ---------------------------------------------------------------------------

const char* equation_name(EquationId id) {
    switch (id) {
    case EquationId::PDE_H: return "PDE_H";
    case EquationId::PDE_L: return "PDE_L";
    case EquationId::PDE_COMPOSE: return "PDE_COMPOSE";
    case EquationId::THM_L: return "THM_L";
    case EquationId::THM_H: return "THM_H";
    case EquationId::CORO_L: return "CORO_L";
    case EquationId::CORO_H: return "CORO_H";
    case EquationId::PDE_PSEUDO: return "PDE_PSEUDO";
    case EquationId::PDE_UMN: return "PDE_UMN";
    }
    return "?";
}

EquationSpec EquationSpec::pde_h(double nu) {
    EquationSpec e;
    e.id = EquationId::PDE_H;
    e.nu = nu;
    e.grid = {0.5, 3.0, 0.5, 3.0};
    return e;
}

EquationSpec EquationSpec::pde_l(double nu) {
    EquationSpec e;
    e.id = EquationId::PDE_L;
    e.nu = nu;
    e.grid = {0.5, 3.0, 0.5, 3.0};
    return e;
}

EquationSpec EquationSpec::pde_compose(double nu1, double nu2, bool caputo) {
    EquationSpec e;
    e.id = EquationId::PDE_COMPOSE;
    e.nu1 = nu1;
    e.nu2 = nu2;
    e.caputo_form = caputo;
    e.grid = {0.5, 2.0, 0.5, 2.0};
    return e;
}

EquationSpec EquationSpec::thm_l(double nu, int n) {
    EquationSpec e;
    e.id = EquationId::THM_L;
    e.nu = nu;
    e.n = n;
    e.grid = {0.5, 2.0, 0.5, 2.0};
    return e;
}

EquationSpec EquationSpec::thm_h(double nu, int n) {
    EquationSpec e;
    e.id = EquationId::THM_H;
    e.nu = nu;
    e.n = n;
    e.grid = {1.0, 3.0, 1.5, 3.0};
    return e;
}

EquationSpec EquationSpec::coro_l(int n) {
    EquationSpec e = thm_l(1.0, n);
    e.id = EquationId::CORO_L;
    return e;
}

EquationSpec EquationSpec::coro_h(int n) {
    EquationSpec e = thm_h(1.0, n);
    e.id = EquationId::CORO_H;
    return e;
}

EquationSpec EquationSpec::pde_pseudo(int n, int kappa) {
    EquationSpec e;
    e.id = EquationId::PDE_PSEUDO;
    e.n = n;
    e.kappa = kappa;
    e.grid = {-2.0, 2.0, 0.5, 2.0};
    return e;
}

EquationSpec EquationSpec::pde_umn(int m, int n) {
    EquationSpec e;
    e.id = EquationId::PDE_UMN;
    e.m = m;
    e.n = n;
    e.grid = {1.0, 3.0, 1.0, 3.0};
    return e;
}

void EquationSpec::validate() const {
    const Rect& g = grid;
    if (!(g.x1 > g.x0) || !(g.t1 > g.t0)) throw DomainError("EquationSpec: empty rectangle");
    if (!(g.t0 > 0.0)) throw DomainError("EquationSpec: t0 must be positive");
    if (id != EquationId::PDE_PSEUDO && !(g.x0 > 0.0)) {
        throw DomainError("EquationSpec: x0 must be positive");
    }
    if (hx < 0.0 || ht < 0.0) throw DomainError("EquationSpec: steps must be positive");
    if (!(tolerance > 0.0)) throw DomainError("EquationSpec: tolerance must be positive");
    auto order_ok = [](double v) { return v > 0.0 && v <= 1.0; };
    switch (id) {
    case EquationId::PDE_H:
    case EquationId::PDE_L:
        if (!(nu > 0.0 && nu < 1.0)) throw DomainError("EquationSpec: nu must lie in (0, 1)");
        break;
    case EquationId::PDE_COMPOSE:
        if (!(nu1 > 0.0 && nu1 < 1.0 && nu2 > 0.0 && nu2 < 1.0)) {
            throw DomainError("EquationSpec: nu1, nu2 must lie in (0, 1)");
        }
        break;
    case EquationId::THM_L:
    case EquationId::THM_H:
        if (!order_ok(nu)) throw DomainError("EquationSpec: nu must lie in (0, 1]");
        [[fallthrough]];
    case EquationId::CORO_L:
    case EquationId::CORO_H:
        if (n < 2) throw DomainError("EquationSpec: n must be at least 2");
        break;
    case EquationId::PDE_PSEUDO:
        if (n < 2) throw DomainError("EquationSpec: n must be at least 2");
        if (kappa != 1 && kappa != -1) throw DomainError("EquationSpec: kappa must be +1 or -1");
        if (n % 2 == 0 && kappa != (((n / 2) % 2 == 1) ? 1 : -1)) {
            throw DomainError("EquationSpec: even n needs kappa = (-1)^{n/2 + 1}");
        }
        break;
    case EquationId::PDE_UMN:
        if (m < 2 || n < 2) throw DomainError("EquationSpec: m, n must be at least 2");
        break;
    }
}

std::string EquationSpec::label() const {
    std::string s = equation_name(id);
    switch (id) {
    case EquationId::PDE_H:
    case EquationId::PDE_L:
        return s + fmt("(%g)", nu);
    case EquationId::PDE_COMPOSE:
        return s + (caputo_form ? "_CAPUTO" : "") + fmt("(%g,%g)", nu1, nu2);
    case EquationId::THM_L:
    case EquationId::THM_H:
        return s + fmt("(%g,%g)", nu, double(n));
    case EquationId::CORO_L:
    case EquationId::CORO_H:
        return s + fmt("(%g)", double(n));
    case EquationId::PDE_PSEUDO:
        return s + fmt("(%g,%+g)", double(n), double(kappa));
    case EquationId::PDE_UMN:
        return s + fmt("(%g,%g)", double(m), double(n));
    }
    return s;
}

std::vector<BoundaryCheck> boundary_check(const EquationSpec& eq) {
    eq.validate();
    std::vector<BoundaryCheck> out;
    const std::array<double, 3> points = {0.5, 1.0, 2.0};
    switch (eq.id) {
    case EquationId::PDE_H: {
        // All x-derivatives of h vanish at 0+, so the extrapolated value is
        // a plain estimate of the limit.
        double worst = 0.0;
        for (double t : points) {
            const Limit lim = right_derivative_at_zero(
                [&](double x) { return kernels::h_density(eq.nu, x, t).value; }, 0, 1e-3);
            worst = std::max(worst, std::abs(lim.value));
        }
        out.push_back({"h(0+,t)", worst, 1e-8});
        break;
    }
    case EquationId::PDE_L: {
        double worst = 0.0;
        for (double t : points) {
            const Limit lim = right_derivative_at_zero(
                [&](double x) { return kernels::l_density(eq.nu, x, t).value; }, 0, 0.1);
            worst = std::max(worst, std::abs(lim.value - fracops::phi_alpha(eq.nu, t)));
        }
        out.push_back({"l(0+,t)=Phi", worst, 1e-6});
        break;
    }
    case EquationId::THM_L:
    case EquationId::CORO_L: {
        const double nu = eq.id == EquationId::CORO_L ? 1.0 : eq.nu;
        const double order = nu / eq.n;
        for (int k = 0; k < eq.n; ++k) {
            double worst = 0.0;
            for (double t : points) {
                const Limit lim = right_derivative_at_zero(
                    [&](double x) { return kernels::l_density(order, x, t).value; }, k, 0.1);
                worst = std::max(worst, std::abs(lim.value - fracops::phi_alpha(nu * (k + 1) / eq.n, t)));
            }
            out.push_back({fmt("D^%g_{0-,x} l(0+,t)", double(k)), worst, k == 0 ? 1e-6 : 1e-3});
        }
        break;
    }
    case EquationId::THM_H:
    case EquationId::CORO_H: {
        const double nu = eq.id == EquationId::CORO_H ? 1.0 : eq.nu;
        const double order = nu / eq.n;
        for (int k = 1; k < eq.n; ++k) {
            double worst = 0.0;
            for (double x : points) {
                const Limit lim = right_derivative_at_zero(
                    [&](double t) { return kernels::h_density(order, x, t).value; }, k, 0.1);
                worst = std::max(worst,
                                 std::abs(lim.value - fracops::phi_alpha(nu * k / eq.n + 1.0, x)));
            }
            out.push_back({fmt("D^%g_{0-,t} h(x,0+)", double(k)), worst, 1e-3});
        }
        break;
    }
    case EquationId::PDE_COMPOSE:
    case EquationId::PDE_PSEUDO:
    case EquationId::PDE_UMN:
        break;
    }
    return out;
}

namespace {

void finish(ResidualReport& r) {
    bool ok = std::isfinite(r.max_abs_residual) && r.max_abs_residual < r.tolerance;
    if (!std::isnan(r.refinement_ratio)) ok = ok && r.refinement_ratio > 1.5;
    for (const auto& b : r.boundary_checks) ok = ok && std::isfinite(b.deviation) && b.deviation < b.tolerance;
    r.passed = ok;
}

ResidualReport failed_report(std::string id, double tol, const std::exception& e) {
    ResidualReport r;
    r.id = std::move(id);
    r.max_abs_residual = r.rms_residual = r.refinement_ratio = kNaN;
    r.tolerance = tol;
    r.passed = false;
    r.diagnostics.push_back(e.what());
    return r;
}

// 64 intervals per side; an axis sampled from 0 gets 8 times finer steps so
// the history integral resolves the kernel's peak near the origin.
double default_step(double lo, double hi, double step, bool from_zero) {
    if (step > 0.0) return step;
    return (hi - lo) / (from_zero ? 512.0 : 64.0);
}

} // namespace

ResidualReport residual(const EquationSpec& eq) {
    eq.validate();
    ResidualReport r;
    r.id = eq.label();
    r.tolerance = eq.tolerance;
    try {
        const Layout L = layout_of(eq);
        const double hx = default_step(eq.grid.x0, eq.grid.x1, eq.hx, L.x_from_zero);
        const double ht = default_step(eq.grid.t0, eq.grid.t1, eq.ht, L.t_from_zero);
        const LevelResult coarse = residual_level(eq, hx, ht);
        const LevelResult fine = residual_level(eq, 0.5 * hx, 0.5 * ht);
        r.max_abs_residual = fine.max_abs;
        r.rms_residual = fine.rms;
        r.refinement_ratio = fine.max_abs > 0.0 ? coarse.max_abs / fine.max_abs
                                                : std::numeric_limits<double>::infinity();
        r.diagnostics.push_back(fmt("base grid max %.5e, rms %.5e", coarse.max_abs, coarse.rms));
        r.boundary_checks = boundary_check(eq);
    } catch (const std::exception& e) {
        return failed_report(r.id, eq.tolerance, e);
    }
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------
// Subordinator density against the Bromwich oracle

std::vector<double> Lattice::values() const {
    if (!(lo > 0.0 && hi > lo && points >= 2)) throw DomainError("Lattice: need 0 < lo < hi, points >= 2");
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) v[i] = lo * std::pow(hi / lo, double(i) / double(points - 1));
    v.back() = hi;
    return v;
}

namespace {

// log of the inverse Laplace transform of exp(-t lambda^nu) at x, with the
// Talbot contour widened to pass near the saddle point of lambda x - t lambda^nu.
double log_stable_oracle(double nu, double x, double t) {
    transforms::ContourSpec c;
    c.scale = std::pow(nu * t / x, 1.0 / (1.0 - nu));
    // Deep in the tail the integrand is a narrow peak on the contour.
    c.max_node_count = 1 << 17;
    auto logF = [nu, t](transforms::Complex s) { return -t * std::pow(s, nu); };
    return transforms::bromwich_invert_log(logF, x, c);
}

ResidualReport lemma0_impl(double nu, const Lattice& lattice, bool with_factor) {
    ResidualReport r;
    r.id = fmt(with_factor ? "LEMMA0(%g)" : "LEMMA0_AS_PRINTED(%g)", nu);
    r.tolerance = std::abs(nu - 0.5) < 1e-12 ? 1e-6 : 1e-5;
    r.refinement_ratio = kNaN;
    try {
        if (!(nu > 0.0 && nu < 1.0)) throw DomainError("lemma0_check: nu must lie in (0, 1)");
        const std::vector<double> v = lattice.values();
        const std::size_t n = v.size();
        std::vector<double> corrected(n * n), printed(n * n);
        parallel_for(n * n, [&](std::size_t k) {
            const double x = v[k % n];
            const double t = v[k / n];
            const double oracle = log_stable_oracle(nu, x, t);
            const double l = kernels::l_density(nu, t, x).log_abs;
            const double base = std::log(t / x) + l;
            corrected[k] = std::abs(std::expm1(std::log(nu) + base - oracle));
            printed[k] = std::abs(std::expm1(base - oracle));
        });
        const std::vector<double>& dev = with_factor ? corrected : printed;
        const std::vector<double>& other = with_factor ? printed : corrected;
        double sum2 = 0.0;
        for (double d : dev) {
            r.max_abs_residual = std::max(r.max_abs_residual, d);
            sum2 += d * d;
        }
        r.rms_residual = std::sqrt(sum2 / double(dev.size()));
        const double other_max = *std::max_element(other.begin(), other.end());
        r.diagnostics.push_back(fmt(with_factor ? "without the factor nu: max relative deviation %.5e"
                                                : "with the factor nu: max relative deviation %.5e",
                                    other_max));
    } catch (const std::exception& e) {
        return failed_report(r.id, r.tolerance, e);
    }
    finish(r);
    return r;
}

} // namespace

ResidualReport lemma0_check(double nu, const Lattice& lattice) { return lemma0_impl(nu, lattice, true); }

ResidualReport lemma0_check_uncorrected(double nu, const Lattice& lattice) {
    return lemma0_impl(nu, lattice, false);
}

// ---------------------------------------------------------------------------
// Space-weighted pseudo kernels

namespace {

// v_n in closed form (n = 2: Gaussian, n = 3: Airy).
double v_closed(int n, int kappa, double x, double t) {
    if (n == 2) return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
    const double s = std::cbrt(3.0 * t);
    return specfun::airy_ai(-kappa * x / s).value / s;
}

struct WeightedLevel {
    LevelResult by_power[3];  // index 1 and 2 used
};

// Residuals of (x/t) v_n and (x/t)^2 v_n, sampling v_n once.
WeightedLevel lemma1_level(int n, int kappa, const Rect& g, double hx, double ht) {
    const Axis ax = make_axis(g.x0, g.x1, hx, false, n);
    const Axis at = make_axis(g.t0, g.t1, ht, false, 1);
    const std::vector<double> xs = ax.values();
    const std::vector<double> ts = at.values();
    const GridValues v = sample_pointwise(
        xs, ts, [=](double x, double t) { return kernels::pseudo_kernel(n, kappa, x, t).value; });
    const std::size_t nx = xs.size(), nt = ts.size();
    WeightedLevel out;
    for (int power = 1; power <= 2; ++power) {
        std::vector<double> w(nx * nt);
        for (std::size_t j = 0; j < nt; ++j) {
            for (std::size_t i = 0; i < nx; ++i) w[j * nx + i] = std::pow(xs[i] / ts[j], power) * v.at(i, j);
        }
        std::vector<double> col(nt), row(nx), dt(nx * nt), dx(nx * nt);
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < nt; ++j) col[j] = w[j * nx + i];
            const auto d = fracops::integer_deriv(GridFunction(ht, col), 1).samples;
            for (std::size_t j = 0; j < nt; ++j) dt[j * nx + i] = d[j];
        }
        for (std::size_t j = 0; j < nt; ++j) {
            for (std::size_t i = 0; i < nx; ++i) row[i] = w[j * nx + i];
            const auto d = fracops::integer_deriv(GridFunction(hx, row), n).samples;
            for (std::size_t i = 0; i < nx; ++i) dx[j * nx + i] = d[i];
        }
        LevelResult& r = out.by_power[power];
        double sum2 = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < nt; ++j) {
            if (!at.inside(j)) continue;
            for (std::size_t i = 0; i < nx; ++i) {
                if (!ax.inside(i)) continue;
                const double res = dt[j * nx + i] - kappa * dx[j * nx + i];
                r.max_abs = std::max(r.max_abs, std::abs(res));
                sum2 += res * res;
                ++count;
            }
        }
        r.rms = std::sqrt(sum2 / double(count));
    }
    return out;
}

// d^{n-1}_x v_n + (kappa/n)(x/t) v_n at (x, t), derivative by central
// differences extrapolated in the step.
double first_order_relation(int n, int kappa, double x, double t) {
    const int k = n - 1;
    std::vector<double> g;
    for (int j = 0; j < 4; ++j) {
        const double d = 0.1 * std::pow(2.0, -j);
        double s;
        if (k == 1) {
            s = (v_closed(n, kappa, x + d, t) - v_closed(n, kappa, x - d, t)) / (2.0 * d);
        } else {
            s = (v_closed(n, kappa, x + d, t) - 2.0 * v_closed(n, kappa, x, t) +
                 v_closed(n, kappa, x - d, t)) / (d * d);
        }
        g.push_back(s);
    }
    const double deriv = richardson(g, 2).value;
    return deriv + (double(kappa) / n) * (x / t) * v_closed(n, kappa, x, t);
}

} // namespace

namespace {

void lemma1_validate(int n, int kappa, const Rect& grid, int intervals) {
    if (n != 2 && n != 3) throw DomainError("lemma1: n must be 2 or 3");
    if (kappa != 1 && kappa != -1) throw DomainError("lemma1: kappa must be +1 or -1");
    if (n == 2 && kappa != 1) throw DomainError("lemma1: n = 2 needs kappa = +1");
    if (!(grid.t0 > 0.0) || !(grid.x1 > grid.x0) || !(grid.t1 > grid.t0) || intervals < 4) {
        throw DomainError("lemma1: bad grid");
    }
}

struct WeightedStudy {
    LevelResult coarse[3], fine[3];
};

WeightedStudy lemma1_study(int n, int kappa, const Rect& grid, int intervals) {
    const double hx = (grid.x1 - grid.x0) / intervals;
    const double ht = (grid.t1 - grid.t0) / intervals;
    const WeightedLevel c = lemma1_level(n, kappa, grid, hx, ht);
    const WeightedLevel f = lemma1_level(n, kappa, grid, 0.5 * hx, 0.5 * ht);
    WeightedStudy s;
    for (int p = 1; p <= 2; ++p) {
        s.coarse[p] = c.by_power[p];
        s.fine[p] = f.by_power[p];
    }
    return s;
}

} // namespace

ResidualReport lemma1_check(int n, int kappa, const Rect& grid, int intervals) {
    ResidualReport r;
    r.id = fmt("LEMMA1(%g,%+g)", double(n), double(kappa));
    r.tolerance = 1e-3;
    try {
        lemma1_validate(n, kappa, grid, intervals);
        const WeightedStudy s = lemma1_study(n, kappa, grid, intervals);
        r.max_abs_residual = s.fine[1].max_abs;
        r.rms_residual = s.fine[1].rms;
        r.refinement_ratio = s.coarse[1].max_abs / s.fine[1].max_abs;
        double worst = 0.0;
        for (double x : {-1.5, -0.5, 0.5, 1.5}) {
            for (double t : {0.5, 1.0, 2.0}) {
                worst = std::max(worst, std::abs(first_order_relation(n, kappa, x, t)));
            }
        }
        r.boundary_checks.push_back({"d^{n-1}_x v + (kappa/n)(x/t) v", worst, 1e-6});
        r.diagnostics.push_back(fmt("(x/t)^2 v: max %.5e", s.fine[2].max_abs) +
                                fmt(", ratio %.5e (not a solution)", s.coarse[2].max_abs / s.fine[2].max_abs));
    } catch (const std::exception& e) {
        return failed_report(r.id, r.tolerance, e);
    }
    finish(r);
    return r;
}

ResidualReport lemma1_power_check(int n, int kappa, int power, const Rect& grid, int intervals) {
    ResidualReport r;
    r.id = fmt("LEMMA1_POWER(%g,%+g,", double(n), double(kappa)) + fmt("%g)", double(power));
    r.tolerance = 1e-3;
    try {
        lemma1_validate(n, kappa, grid, intervals);
        if (power != 1 && power != 2) throw DomainError("lemma1_power_check: power must be 1 or 2");
        const WeightedStudy s = lemma1_study(n, kappa, grid, intervals);
        r.max_abs_residual = s.fine[power].max_abs;
        r.rms_residual = s.fine[power].rms;
        r.refinement_ratio = s.coarse[power].max_abs / s.fine[power].max_abs;
    } catch (const std::exception& e) {
        return failed_report(r.id, r.tolerance, e);
    }
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------
// Transform identities

namespace {

ResidualReport identity_report(std::string id, double tol, const std::function<double()>& deviation) {
    ResidualReport r;
    r.id = std::move(id);
    r.tolerance = tol;
    r.refinement_ratio = kNaN;
    try {
        r.max_abs_residual = r.rms_residual = deviation();
    } catch (const std::exception& e) {
        return failed_report(r.id, tol, e);
    }
    finish(r);
    return r;
}

transforms::QuadratureSpec tight() {
    transforms::QuadratureSpec q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-10;
    return q;
}

// E_{1/2,1/2}(-y) = 1/sqrt(pi) - y e^{y^2} erfc(y), from
// E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z) and E_{1/2,1}(-y) = e^{y^2} erfc(y).
double ml_half_half(double y) { return 1.0 / std::sqrt(M_PI) - y * std::exp(y * y) * std::erfc(y); }

// int_0^inf e^{-lambda z} z^{-1/2} E_{1/2,1/2}(-z^{1/2}) dz: the series on
// [0, Z], Z the end of the range where it meets a 1e-12 absolute tolerance,
// and the erfc form beyond (to z = 400, past which e^{-lambda z} is negligible
// for lambda >= 0.5).
struct SplitMl {
    double series_part;
    double closed_part;
    double split;
};

SplitMl ml_laplace_half_half(double lambda) {
    specfun::SeriesControl ctl;
    ctl.abs_tol = 1e-12;
    ctl.rel_tol = 1e-9;
    auto series_ok = [&](double z) {
        try {
            specfun::mittag_leffler(0.5, 0.5, -std::sqrt(z), ctl);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    };
    double lo = 0.0, hi = 400.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (series_ok(mid) ? lo : hi) = mid;
    }
    const double Z = lo;
    auto series = [&](double z) {
        if (z <= 0.0) return 0.0;
        return std::exp(-lambda * z) / std::sqrt(z) *
               specfun::mittag_leffler(0.5, 0.5, -std::sqrt(z), ctl).value;
    };
    // Geometric breakpoints handle the z^{-1/2} endpoint singularity.
    std::vector<double> bp{0.0};
    for (int k = 40; k >= 0; --k) bp.push_back(Z * std::pow(0.5, k));
    const quad::Result head = quad::integrate(series, bp, {1e-13, 1e-11, 2000});
    auto closed = [&](double z) { return std::exp(-lambda * z) / std::sqrt(z) * ml_half_half(std::sqrt(z)); };
    const quad::Result tail = quad::integrate(closed, Z, 400.0, {1e-13, 1e-11, 2000});
    return {head.value, tail.value, Z};
}

} // namespace

std::vector<ResidualReport> laplace_identity_suite() {
    std::vector<std::function<ResidualReport()>> checks;
    checks.push_back([] {
        return identity_report("LAPLACE_X_H(0.5,1,2)", 1e-5, [] {
            const double v = transforms::laplace([](double x) { return h_or_zero(0.5, x, 1.0); }, 2.0, tight());
            return std::abs(v - std::exp(-std::sqrt(2.0)));
        });
    });
    checks.push_back([] {
        return identity_report("LAPLACE_X_L(0.5,1,1)", 1e-6, [] {
            const double v = transforms::laplace([](double x) { return l_or_zero(0.5, x, 1.0); }, 1.0, tight());
            return std::abs(v - specfun::mittag_leffler(0.5, 1.0, -1.0).value);
        });
    });
    checks.push_back([] {
        return identity_report("LAPLACE_X_L(0.7,2,0.5)", 1e-6, [] {
            const double v = transforms::laplace([](double x) { return l_or_zero(0.7, x, 0.5); }, 2.0, tight());
            return std::abs(v - specfun::mittag_leffler(0.7, 1.0, -2.0 * std::pow(0.5, 0.7)).value);
        });
    });
    checks.push_back([] {
        return identity_report("LAPLACE_T_H(0.5,1,1)", 1e-6, [] {
            const double v = transforms::laplace([](double t) { return h_or_zero(0.5, 1.0, t); }, 1.0, tight());
            return std::abs(v - specfun::mittag_leffler(0.5, 0.5, -1.0).value);
        });
    });
    checks.push_back([] {
        return identity_report("LAPLACE_PHI(0.5,4)", 1e-5, [] {
            const double v = transforms::laplace([](double t) { return fracops::phi_alpha(0.5, t); }, 4.0, tight());
            return std::abs(v - 0.5);
        });
    });
    for (double lambda : {0.5, 1.0, 2.0}) {
        checks.push_back([lambda] {
            SplitMl parts{};
            ResidualReport r = identity_report(fmt("LAPLACE_ML(0.5,0.5,%g)", lambda), 1e-5, [&] {
                parts = ml_laplace_half_half(lambda);
                const double exact = 1.0 / (std::sqrt(lambda) + 1.0);
                return std::abs(parts.series_part + parts.closed_part - exact);
            });
            r.diagnostics.push_back(fmt("series on [0, %.5g]", parts.split) +
                                    fmt(", erfc form beyond contributes %.5e", parts.closed_part));
            return r;
        });
    }
    checks.push_back([] {
        return identity_report("DOUBLE_LAPLACE_H(0.5,1,1)", 1e-5, [] {
            const double v = transforms::double_laplace(
                [](double x, double t) { return h_or_zero(0.5, x, t); }, 1.0, 1.0, tight());
            return std::abs(v - 0.5);
        });
    });
    checks.push_back([] {
        return identity_report("DOUBLE_LAPLACE_L(0.5,1,1)", 1e-5, [] {
            const double v = transforms::double_laplace(
                [](double x, double t) { return l_or_zero(0.5, x, t); }, 1.0, 1.0, tight());
            return std::abs(v - 0.5);
        });
    });
    std::vector<ResidualReport> out(checks.size());
    parallel_for(checks.size(), [&](std::size_t i) { out[i] = checks[i](); });
    return out;
}

// ---------------------------------------------------------------------------

std::string format_report_line(const ResidualReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %.5e %.5e %.5e %s", r.id.c_str(), r.max_abs_residual,
                  r.rms_residual, r.refinement_ratio, r.passed ? "PASS" : "FAIL");
    return buf;
}

std::vector<EquationSpec> default_equations() {
    std::vector<EquationSpec> v;
    v.push_back(EquationSpec::pde_h(0.5));
    v.push_back(EquationSpec::pde_l(0.5));
    v.push_back(EquationSpec::pde_compose(0.5, 1.0 / 3.0, false));
    v.push_back(EquationSpec::pde_compose(0.5, 1.0 / 3.0, true));
    for (auto [nu, n] : {std::pair{1.0, 2}, std::pair{1.0, 3}, std::pair{0.5, 2}}) {
        v.push_back(EquationSpec::thm_l(nu, n));
    }
    for (auto [nu, n] : {std::pair{1.0, 2}, std::pair{1.0, 3}, std::pair{0.5, 2}}) {
        v.push_back(EquationSpec::thm_h(nu, n));
    }
    v.push_back(EquationSpec::coro_l(2));
    v.push_back(EquationSpec::coro_l(3));
    v.push_back(EquationSpec::coro_h(2));
    v.push_back(EquationSpec::coro_h(3));
    v.push_back(EquationSpec::pde_pseudo(2, 1));
    v.push_back(EquationSpec::pde_pseudo(3, 1));
    v.push_back(EquationSpec::pde_pseudo(3, -1));
    v.push_back(EquationSpec::pde_umn(2, 2));
    return v;
}

std::vector<ResidualReport> run_all() {
    std::vector<ResidualReport> out;
    for (const EquationSpec& eq : default_equations()) out.push_back(residual(eq));
    for (double nu : {0.3, 0.5, 0.7}) out.push_back(lemma0_check(nu));
    out.push_back(lemma1_check(2, 1));
    out.push_back(lemma1_check(3, 1));
    out.push_back(lemma1_check(3, -1));
    for (auto& r : laplace_identity_suite()) out.push_back(std::move(r));
    return out;
}

} // namespace fracho::verify
