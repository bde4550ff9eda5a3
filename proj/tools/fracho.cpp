// fracho: tabulate kernels to CSV and run verification suites.
//
// Exit status: 0 when everything requested succeeded and passed, 1 when a
// check failed or a kernel could not be evaluated, 2 for invalid invocations.

#include "fracho/error.hpp"
#include "fracho/kernels.hpp"
#include "fracho/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fracho;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "a", or "a:b:step" with both ends included.
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("bad number '" + item + "' in range '" + text + "'");
        }
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw UsageError("range must be 'value' or 'start:stop:step': " + text);
    const double a = parts[0], b = parts[1], h = parts[2];
    if (!(h > 0.0) || b < a) throw UsageError("range needs start <= stop and step > 0: " + text);
    const long count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (count > 10'000'000) throw UsageError("range too long: " + text);
    std::vector<double> v(count);
    for (long i = 0; i < count; ++i) v[i] = a + h * static_cast<double>(i);
    return v;
}

struct Params {
    double nu = 0.5, nu1 = 0.5, nu2 = 1.0 / 3.0, alpha = 1.0;
    int m = 2, n = 2, kappa = 1;
};

kernels::KernelValue evaluate_named(const std::string& kernel, const Params& p, double x, double t) {
    using namespace kernels;
    if (kernel == "h") return h_density(p.nu, x, t);
    if (kernel == "l") return l_density(p.nu, x, t);
    if (kernel == "lamperti") return evaluate(KernelSpec::lamperti(p.nu), x, t);
    if (kernel == "compose") return compose_density(p.nu1, p.nu2, x, t);
    if (kernel == "umn") return u_mn(p.m, p.n, x, t);
    if (kernel == "pseudo") return pseudo_kernel(p.n, p.kappa, x, t);
    if (kernel == "folded") return folded_stable(p.alpha, x, t);
    if (kernel == "u1") return u_closed(ClosedForm::U1, x, t);
    if (kernel == "u2") return u_closed(ClosedForm::U2, x, t);
    if (kernel == "u3") return u_closed(ClosedForm::U3, x, t);
    if (kernel == "u2-subordinated") return u2_subordinated(x, t);
    throw UsageError("unknown kernel '" + kernel + "'");
}

const std::vector<std::string> kKernels = {"h",      "l",      "lamperti", "compose", "umn", "pseudo",
                                           "folded", "u1",     "u2",       "u3",      "u2-subordinated"};

const std::vector<std::string> kSuites = {"all",    "pde-h",  "pde-l",  "pde-compose", "thm-l",
                                          "thm-h",  "coro-l", "coro-h", "pseudo",      "umn",
                                          "lemma0", "lemma1", "identities"};

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw UsageError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int run_tabulate(const std::string& kernel, const Params& p, const std::string& xr, const std::string& tr,
                 const std::string& out_path) {
    const std::vector<double> xs = parse_range(xr);
    const std::vector<double> ts = parse_range(tr);
    // Evaluate everything first so a failing point leaves no partial output.
    std::string body = "x,t,value\n";
    char line[128];
    for (double t : ts) {
        for (double x : xs) {
            const double v = evaluate_named(kernel, p, x, t).value;
            std::snprintf(line, sizeof line, "%.15g,%.15g,%.15g\n", x, t, v);
            body += line;
        }
    }
    Output out(out_path);
    std::ostream& os = out.stream();
    os << body;
    os.flush();
    return 0;
}

struct GridOverride {
    double x0 = NAN, x1 = NAN, t0 = NAN, t1 = NAN, hx = 0.0, ht = 0.0, tol = 0.0;
    bool caputo = false;

    verify::EquationSpec apply(verify::EquationSpec e) const {
        if (!std::isnan(x0)) e.grid.x0 = x0;
        if (!std::isnan(x1)) e.grid.x1 = x1;
        if (!std::isnan(t0)) e.grid.t0 = t0;
        if (!std::isnan(t1)) e.grid.t1 = t1;
        if (hx > 0.0) e.hx = hx;
        if (ht > 0.0) e.ht = ht;
        if (tol > 0.0) e.tolerance = tol;
        return e;
    }
};

std::vector<verify::ResidualReport> run_suite(const std::string& suite, const Params& p, const GridOverride& g) {
    using verify::EquationSpec;
    std::vector<verify::ResidualReport> out;
    auto eq = [&](const EquationSpec& e) { out.push_back(verify::residual(g.apply(e))); };
    if (suite == "all") return verify::run_all();
    if (suite == "pde-h") eq(EquationSpec::pde_h(p.nu));
    else if (suite == "pde-l") eq(EquationSpec::pde_l(p.nu));
    else if (suite == "pde-compose") eq(EquationSpec::pde_compose(p.nu1, p.nu2, g.caputo));
    else if (suite == "thm-l") eq(EquationSpec::thm_l(p.nu, p.n));
    else if (suite == "thm-h") eq(EquationSpec::thm_h(p.nu, p.n));
    else if (suite == "coro-l") eq(EquationSpec::coro_l(p.n));
    else if (suite == "coro-h") eq(EquationSpec::coro_h(p.n));
    else if (suite == "pseudo") eq(EquationSpec::pde_pseudo(p.n, p.kappa));
    else if (suite == "umn") eq(EquationSpec::pde_umn(p.m, p.n));
    else if (suite == "lemma0") out.push_back(verify::lemma0_check(p.nu));
    else if (suite == "lemma1") out.push_back(verify::lemma1_check(p.n, p.kappa));
    else if (suite == "identities") out = verify::laplace_identity_suite();
    else throw UsageError("unknown suite '" + suite + "'");
    return out;
}

nlohmann::json to_json(const verify::ResidualReport& r) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["id"] = r.id;
    j["max_abs_residual"] = num(r.max_abs_residual);
    j["rms_residual"] = num(r.rms_residual);
    j["refinement_ratio"] = num(r.refinement_ratio);
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    j["boundary_checks"] = nlohmann::json::array();
    for (const auto& b : r.boundary_checks) {
        j["boundary_checks"].push_back({{"name", b.name}, {"deviation", num(b.deviation)}, {"tolerance", b.tolerance}});
    }
    j["diagnostics"] = r.diagnostics;
    return j;
}

int report(const std::vector<verify::ResidualReport>& reports, const std::string& out_path, bool verbose,
           bool as_json) {
    Output out(out_path);
    std::ostream& os = out.stream();
    bool all = true;
    if (as_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        os << arr.dump(2) << "\n";
    }
    for (const auto& r : reports) {
        all = all && r.passed;
        if (as_json) continue;
        os << verify::format_report_line(r) << "\n";
        if (verbose) {
            char buf[256];
            for (const auto& b : r.boundary_checks) {
                std::snprintf(buf, sizeof buf, "#   %s %.5e (tol %.1e)", b.name.c_str(), b.deviation, b.tolerance);
                os << buf << "\n";
            }
            for (const auto& d : r.diagnostics) os << "#   " << d << "\n";
        }
    }
    os.flush();
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernels of stable subordinators, their inverses and compositions: tabulation and checks"};
    app.set_config("--config", "", "Optional key=value file; command-line flags take precedence");
    app.require_subcommand(1);

    Params p;
    std::string out_path;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--nu", p.nu, "Order nu (h, l, lamperti; suites pde-h, pde-l, thm-*, lemma0)")
            ->capture_default_str();
        sub->add_option("--nu1", p.nu1, "Time order of the composition")->capture_default_str();
        sub->add_option("--nu2", p.nu2, "Space order of the composition")->capture_default_str();
        sub->add_option("--m", p.m, "Space order m of u_mn")->capture_default_str();
        sub->add_option("--n", p.n, "Order n (u_mn, pseudo, thm-*, coro-*, lemma1)")->capture_default_str();
        sub->add_option("--kappa", p.kappa, "Sign kappa of the pseudo equation (+1 or -1)")
            ->capture_default_str();
        sub->add_option("--out", out_path, "Write to this file instead of stdout");
    };

    auto* tab = app.add_subcommand("tabulate", "Evaluate a kernel on a grid and print CSV (x,t,value)");
    std::string kernel = "l", xr = "1", tr = "1";
    tab->add_option("--kernel", kernel, "Kernel name")
        ->check(CLI::IsMember(kKernels))
        ->capture_default_str();
    tab->add_option("--x", xr, "x value or start:stop:step (inclusive)")->capture_default_str();
    tab->add_option("--t", tr, "t value or start:stop:step (inclusive)")->capture_default_str();
    tab->add_option("--alpha", p.alpha, "Stability index of the folded stable kernel")->capture_default_str();
    add_params(tab);

    auto* ver = app.add_subcommand("verify", "Run residual, boundary and identity checks");
    std::string suite = "all";
    GridOverride grid;
    bool verbose = false, as_json = false;
    ver->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(kSuites))->capture_default_str();
    ver->add_option("--tol", grid.tol, "Residual tolerance for equation suites (default 1e-3)");
    ver->add_option("--x0", grid.x0, "Residual rectangle: x start");
    ver->add_option("--x1", grid.x1, "Residual rectangle: x end");
    ver->add_option("--t0", grid.t0, "Residual rectangle: t start");
    ver->add_option("--t1", grid.t1, "Residual rectangle: t end");
    ver->add_option("--hx", grid.hx, "Base x step (default: side/64, side/512 on axes sampled from 0)");
    ver->add_option("--ht", grid.ht, "Base t step (same default rule)");
    ver->add_flag("--caputo", grid.caputo, "pde-compose: Caputo derivative in t");
    ver->add_flag("--verbose", verbose, "Also print boundary checks and diagnostics as # lines");
    ver->add_flag("--json", as_json, "Print reports as JSON instead of report lines");
    add_params(ver);

    auto* ids = app.add_subcommand("identities", "Run the transform identity checks");
    ids->add_flag("--verbose", verbose, "Also print diagnostics as # lines");
    ids->add_option("--out", out_path, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (tab->parsed()) return run_tabulate(kernel, p, xr, tr, out_path);
        if (ver->parsed()) return report(run_suite(suite, p, grid), out_path, verbose, as_json);
        if (ids->parsed()) return report(verify::laplace_identity_suite(), out_path, verbose, false);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
