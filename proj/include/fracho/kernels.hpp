#pragma once

// Density kernels: the stable subordinator density h_nu, its inverse l_nu,
// their compositions, pseudo-process kernels and the m = 3 closed forms.
//
// l_nu(x, t) = t^{-nu} W_{-nu, 1-nu}(-x t^{-nu}) is summed as a Wright series.
// Once cancellation makes the series useless (large x t^{-nu}) the same value
// is obtained from Zolotarev's integral for the one-sided stable density,
// through h_nu(x, t) = nu (t / x) l_nu(t, x). Values are carried in log form as
// well, since the far tails underflow long before they stop mattering for
// relative comparisons.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace fracho::kernels {

enum class KernelKind { H, L, LAMPERTI, COMPOSE, U_MN, PSEUDO, U1, U2, U3, FOLDED_STABLE };

struct KernelSpec {
    KernelKind kind = KernelKind::L;
    double nu = 0.5;     ///< H, L, LAMPERTI
    double nu1 = 0.5;    ///< COMPOSE: order in t
    double nu2 = 0.5;    ///< COMPOSE: order in x
    int m = 2;           ///< U_MN
    int n = 2;           ///< U_MN, PSEUDO
    int kappa = 1;       ///< PSEUDO
    double alpha = 1.0;  ///< FOLDED_STABLE

    static KernelSpec h(double nu);
    static KernelSpec l(double nu);
    static KernelSpec lamperti(double nu);
    static KernelSpec compose(double nu1, double nu2);
    static KernelSpec u_mn(int m, int n);
    static KernelSpec pseudo(int n, int kappa);
    static KernelSpec closed(KernelKind which);
    static KernelSpec folded_stable(double alpha);

    /// Throws DomainError when the parameters are outside the kernel's range.
    void validate() const;
    std::string describe() const;
};

enum class Method { closed_form, series, quadrature };

struct KernelValue {
    double value = 0.0;
    Method method = Method::closed_form;
    double error_estimate = 0.0;
    /// log |value|, finite even where value underflows to 0 (-inf for true zeros).
    double log_abs = 0.0;
};

const char* method_name(Method m);

/// t^{-nu} W_{-nu,1-nu}(-x t^{-nu}); Phi_nu(t) at x = 0.
KernelValue l_density(double nu, double x, double t);

/// Density of the nu-stable subordinator at time t: nu (t/x) l_nu(t, x); 0 at x = 0.
KernelValue h_density(double nu, double x, double t);

/// |xi|^nu exp(-i (pi nu / 2) sign xi).
std::complex<double> levy_exponent(double nu, double xi);

/// Lamperti density (1/pi) x^{nu-1} sin(pi nu) / (1 + 2 x^nu cos(pi nu) + x^{2 nu}).
KernelValue lamperti(double nu, double x);

/// int_0^inf h_{nu2}(x, s) l_{nu1}(s, t) ds.
KernelValue compose_density(double nu1, double nu2, double x, double t);

/// int_0^inf l_{1/m}(x, s) h_{1/n}(s, t) ds, with u_{m,1} = l_{1/m} and u_{1,n} = h_{1/n}.
KernelValue u_mn(int m, int n, double x, double t);

/// Density of |S(t)| for the symmetric alpha-stable process with symbol |xi|^alpha.
KernelValue folded_stable(double alpha, double x, double t);

/// (1/2pi) int e^{-i zeta x + kappa (-i zeta)^n t} d zeta. Even n = 2p needs
/// kappa = (-1)^{p+1}.
KernelValue pseudo_kernel(int n, int kappa, double x, double t);

enum class ClosedForm { U1, U2, U3 };

/// The m = 3 solutions in the form they are usually quoted:
///   u1 = (1/pi) sqrt(x/t) K_{1/3}(2 x^{3/2} / (3^{3/2} sqrt t)),
///   u2 = (1/4) sqrt(3/(x pi)) e^{x^3/(27 t^2)} W_{-1/2,1/6}(2 x^3/(27 t^2)),
///   u3 = 2 t / (3^{3/2} pi (x^2 + x t + t^2)).
/// u2 and u3 in this form are not the subordinated densities; see
/// u2_subordinated and the note on u3 in the README.
KernelValue u_closed(ClosedForm which, double x, double t);

/// int_0^inf u1(x, s) h_{1/2}(s, t) ds in closed form:
///   (sqrt 3 / (2 sqrt(pi) x)) e^{2 x^3/(27 t^2)} W_{-1/2,1/6}(4 x^3/(27 t^2)).
KernelValue u2_subordinated(double x, double t);

/// Values on a tensor grid, row-major with t outer: values[j * xs.size() + i]
/// belongs to (xs[i], ts[j]).
struct GridValues {
    std::vector<double> xs, ts, values;
    double at(std::size_t i, std::size_t j) const { return values[j * xs.size() + i]; }
};

/// compose_density on a tensor grid. All points share one trapezoidal rule in
/// log s (step 0.05, range grown until the integrand is negligible), which
/// turns the grid into a matrix product. Accurate to roughly 1e-12 relative
/// to the largest value; t = 0 rows are 0 for x > 0.
GridValues compose_grid(double nu1, double nu2, const std::vector<double>& xs,
                        const std::vector<double>& ts);

/// u_mn on a tensor grid by the same shared rule (m, n >= 2).
GridValues u_mn_grid(int m, int n, const std::vector<double>& xs, const std::vector<double>& ts);

/// Any kernel by spec (x is the space variable; PSEUDO accepts x < 0).
KernelValue evaluate(const KernelSpec& spec, double x, double t);

/// Even extension k(|x|, t) of an L or U_MN kernel.
KernelValue symmetric_extension(const KernelSpec& spec, double x, double t);

} // namespace fracho::kernels
