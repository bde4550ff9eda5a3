#include "fracho/quadrature.hpp"

#include "fracho/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace fracho::quad {

namespace {

// QUADPACK qk21 nodes: xgk[1], xgk[3], ... are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
    double a, b;
    Result r;
};

struct WorseFirst {
    bool operator()(const Panel& p, const Panel& q) const {
        if (p.r.error != q.r.error) return p.r.error < q.r.error;
        return p.a > q.a;
    }
};

double tolerance_target(const Tolerance& tol, double value) {
    return std::max(tol.abs_tol, tol.rel_tol * std::abs(value));
}

} // namespace

void CompensatedSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        comp_ += (sum_ - t) + v;
    } else {
        comp_ += (v - t) + sum_;
    }
    sum_ = t;
}

Result kronrod21(const Integrand& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = fc * kWgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double s = f1[j] + f2[j];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    Result r;
    r.value = resk * half;
    r.evaluations = 21;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * resabs, err);
    }
    r.error = err;
    r.converged = std::isfinite(r.value);
    if (!r.converged) {
        throw ConvergenceError("quadrature: non-finite integrand sample");
    }
    return r;
}

Result integrate(const Integrand& f, const std::vector<double>& breakpoints, const Tolerance& tol) {
    if (breakpoints.size() < 2) {
        throw DomainError("quadrature: need at least two breakpoints");
    }
    std::priority_queue<Panel, std::vector<Panel>, WorseFirst> open;
    std::vector<Panel> closed;
    double total = 0.0;
    double total_err = 0.0;
    int evaluations = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (!(b > a)) continue;
        Panel p{a, b, kronrod21(f, a, b)};
        evaluations += p.r.evaluations;
        total += p.r.value;
        total_err += p.r.error;
        open.push(p);
    }

    int subdivisions = static_cast<int>(open.size());
    bool converged = false;
    while (true) {
        if (total_err <= tolerance_target(tol, total)) {
            converged = true;
            break;
        }
        if (open.empty() || subdivisions >= tol.max_subdivisions) break;
        Panel worst = open.top();
        open.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 16.0 * kEps * std::abs(mid) ||
            (worst.b - worst.a) < 1e-280) {
            // Panel cannot be split any further; its error stays in the total.
            closed.push_back(worst);
            continue;
        }
        Panel left{worst.a, mid, kronrod21(f, worst.a, mid)};
        Panel right{mid, worst.b, kronrod21(f, mid, worst.b)};
        evaluations += 42;
        ++subdivisions;
        total += left.r.value + right.r.value - worst.r.value;
        total_err += left.r.error + right.r.error - worst.r.error;
        open.push(left);
        open.push(right);
    }

    while (!open.empty()) {
        closed.push_back(open.top());
        open.pop();
    }
    std::sort(closed.begin(), closed.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
    CompensatedSum value, error;
    for (const auto& p : closed) {
        value.add(p.r.value);
        error.add(p.r.error);
    }
    Result r;
    r.value = value.value();
    r.error = error.value();
    r.evaluations = evaluations;
    r.converged = converged || r.error <= tolerance_target(tol, r.value);
    return r;
}

Result integrate(const Integrand& f, double a, double b, const Tolerance& tol) {
    if (a == b) return Result{0.0, 0.0, 0, true};
    if (b < a) {
        Result r = integrate(f, b, a, tol);
        r.value = -r.value;
        return r;
    }
    return integrate(f, std::vector<double>{a, b}, tol);
}

Result integrate_to_infinity(const Integrand& f, double a, const Tolerance& tol) {
    auto g = [&f, a](double u) {
        if (u <= 0.0) return 0.0;
        const double x = a + (1.0 - u) / u;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (u * u);
    };
    return integrate(g, std::vector<double>{0.0, 0.125, 0.25, 0.5, 1.0}, tol);
}

Result integrate_log_scale(const Integrand& f, double center, const Tolerance& tol,
                           double initial_half_width, double max_half_width) {
    if (!(center > 0.0)) {
        throw DomainError("integrate_log_scale: center must be positive");
    }
    const double c = std::log(center);
    auto g = [&f](double y) {
        const double s = std::exp(y);
        const double v = f(s);
        return v == 0.0 ? 0.0 : v * s;
    };
    auto panels = [](double a, double b, int n) {
        std::vector<double> bp(n + 1);
        for (int i = 0; i <= n; ++i) bp[i] = a + (b - a) * i / n;
        bp[n] = b;
        return bp;
    };
    double half = initial_half_width;
    Result total = integrate(g, panels(c - half, c + half, 8), tol);
    while (true) {
        Result left = integrate(g, panels(c - 2.0 * half, c - half, 4), tol);
        Result right = integrate(g, panels(c + half, c + 2.0 * half, 4), tol);
        total.value += left.value + right.value;
        total.error += left.error + right.error;
        total.evaluations += left.evaluations + right.evaluations;
        total.converged = total.converged && left.converged && right.converged;
        half *= 2.0;
        if (std::abs(left.value) + std::abs(right.value) <= tolerance_target(tol, total.value)) {
            break;
        }
        if (half >= max_half_width) {
            total.converged = false;
            break;
        }
    }
    return total;
}

Extrapolation wynn_epsilon(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
    if (n < 3) {
        const double err = n == 2 ? std::abs(s[1] - s[0]) : std::numeric_limits<double>::infinity();
        return {s.back(), err};
    }
    std::vector<double> prev(n + 1, 0.0);
    std::vector<double> cur(s.begin(), s.end());
    double best = s.back();
    double best_err = std::abs(s[n - 1] - s[n - 2]);
    double last_even = s.back();
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t m = cur.size() - 1;
        std::vector<double> next(m);
        bool degenerate = false;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = cur[j + 1] - cur[j];
            if (d == 0.0 || !std::isfinite(d)) {
                degenerate = true;
                break;
            }
            next[j] = prev[j + 1] + 1.0 / d;
        }
        if (degenerate) break;
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0) {
            const double est = cur.back();
            double err = std::abs(est - last_even);
            if (cur.size() >= 2) err += std::abs(est - cur[cur.size() - 2]);
            if (std::isfinite(est) && err < best_err) {
                best = est;
                best_err = err;
            }
            last_even = est;
        }
        if (cur.size() < 2) break;
    }
    return {best, best_err};
}

} // namespace fracho::quad
