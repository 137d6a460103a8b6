// Acceptance run: one PASS/FAIL line per criterion, pinned tolerances and
// runtime limits. Exit status is the number of failed criteria.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "weingarten/graphgeom.hpp"
#include "weingarten/homotopy.hpp"
#include "weingarten/run.hpp"
#include "weingarten/verify.hpp"

using namespace weingarten;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string config_path(const std::string& name) { return std::string(WEINGARTEN_CONFIGS) + "/" + name; }

double max_abs_diff(const basegrid::GridField& a, const basegrid::GridField& b) {
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

// Newton from the config's constant initial field, as the `newton` subcommand does.
std::pair<run::Problem, pde::NewtonResult> newton_from_config(const std::string& name) {
    const auto cfg = run::load_config(config_path(name));
    auto problem = run::build_problem(cfg, !cfg.solver.initial.has_value());
    pde::SolverState st{basegrid::GridField(problem.mfld, cfg.solver.initial.value_or(problem.phi ? problem.phi->t0 : 0.0)),
                        cfg.k, problem.psi, problem.profile, problem.mfld, run::solver_options(cfg)};
    auto result = pde::newton_iterate(st);
    return {std::move(problem), std::move(result)};
}

Verdict symmetric_functions() {
    // 2e4 draws per n leave at least 1e4 per n for the suites that filter draws
    const auto suites = verify::symfunc_sweeps(20240601, 20000);
    Verdict v{true, {}};
    for (const auto& s : suites) {
        const bool ok = s.passed && s.samples >= 30000;
        v.passed = v.passed && ok;
        v.detail += fmt("%s%s %ld/%ld worst %.2e", v.detail.empty() ? "" : "; ", s.name.c_str(), s.violations,
                        s.samples, s.worst);
    }
    return v;
}

Verdict geometry_exactness() {
    const auto suites = verify::geometry_identities(7, 20000);
    Verdict v{true, {}};
    for (const auto& s : suites) {
        v.passed = v.passed && s.passed;
        v.detail += fmt("%s%s worst %.2e (tol %.0e, %ld samples)", v.detail.empty() ? "" : "; ", s.name.c_str(),
                        s.worst, s.tolerance, s.samples);
    }
    return v;
}

Verdict polar_oracle() {
    const auto order = verify::convergence_orders().front();
    // kappa(0) = 4/9 on the finest grid; the node u = 0 lies on every grid
    const auto profile = warp::WarpProfile::euclidean(0.5, 4.0);
    const auto m = basegrid::build_grid({basegrid::BaseKind::torus1, 256, 1});
    const auto z = m.sample([](const basegrid::Coordinates& x) { return 2 + std::cos(x[0]); });
    const double k0 = graphgeom::point_geometry(profile, m, z, 0).kappa(0);
    const double exact0 = (9.0 + 0.0 + 3.0) / 27.0;  // (r^2 + 2r'^2 - r r'') / (r^2 + r'^2)^{3/2} at r = 3
    const bool ok = order.passed && std::abs(exact0 - 4.0 / 9.0) <= 1e-16 && std::abs(k0 - 4.0 / 9.0) <= 1e-4;
    return {ok, fmt("order %.3f (>= 1.9), %s, kappa(0) = %.10f vs 4/9", order.worst, order.detail.c_str(), k0)};
}

Verdict slice_recovery() {
    const auto [p, r] = newton_from_config("slice_recovery.json");
    const double t0 = run::build_problem(run::load_config(config_path("slice_recovery.json")), true).phi->t0;
    const double err = (r.z.values().array() - t0).abs().maxCoeff();
    const double t0_err = std::abs(t0 - 0.75);
    return {r.converged() && err <= 1e-9 && r.iterations <= 10 && t0_err <= 1e-12,
            fmt("%s in %d iterations, |z - t0|_inf = %.2e (<= 1e-9), t0 = %.17g", pde::to_string(r.status).c_str(),
                r.iterations, err, t0)};
}

Verdict manufactured() {
    Verdict v{true, {}};
    for (const char* name : {"manufactured_torus1.json", "manufactured_torus2.json"}) {
        const auto [p, r] = newton_from_config(name);
        const double err = max_abs_diff(r.z, *p.zstar);
        bool admissible = true;
        for (const auto& d : r.history) admissible = admissible && d.gamma_k_ok;
        v.passed = v.passed && r.converged() && err <= 1e-8 && admissible;
        v.detail += fmt("%sk=%d %dx%d: %s, |z - z*|_inf = %.2e (<= 1e-8)", v.detail.empty() ? "" : "; ", p.config.k,
                        p.mfld.rows(), p.mfld.cols(), pde::to_string(r.status).c_str(), err);
    }
    return v;
}

Verdict continuation() {
    const auto cfg = run::load_config(config_path("continuation.json"));
    const auto p = run::build_problem(cfg, true);
    const auto hc = run::homotopy_config(p);
    pde::SolverState st{basegrid::GridField(p.mfld, p.phi->t0), cfg.k, hc.target, p.profile, p.mfld,
                        run::solver_options(cfg)};
    const auto res = homotopy::continue_path(hc, st);
    bool admissible = true, finite = true;
    double min_eig = std::numeric_limits<double>::infinity();
    long iterates = 0;
    for (const auto& step : res.steps)
        for (const auto& d : step.iterates) {
            ++iterates;
            admissible = admissible && d.gamma_k_ok;
            min_eig = std::min(min_eig, d.min_shape_eigenvalue);
            finite = finite && std::isfinite(d.kappa_max) && std::isfinite(d.gradmax) && std::isfinite(d.tau_min);
        }
    auto final_state = st;
    final_state.z = res.z;
    const double residual = pde::residual(final_state).values().cwiseAbs().maxCoeff();
    const bool ok = res.success && res.last_good_s == 1.0 && residual <= 1e-8 && admissible && min_eig > 0 &&
                    finite && iterates > 0;
    return {ok, fmt("reached s = %.17g in %zu steps (%d retries), |R|_inf = %.2e (<= 1e-8), %ld iterates all "
                    "admissible: %s, min shape eigenvalue %.4f",
                    res.last_good_s, res.steps.size(), res.failed_attempts, residual, iterates,
                    admissible ? "yes" : "no", min_eig)};
}

Verdict hypotheses() {
    Verdict v{true, {}};
    auto setup = [](const char* name) {
        const auto cfg = run::load_config(config_path(name));
        return run::build_problem(cfg, true);
    };
    {
        const auto p = setup("hypotheses.json");
        homotopy::HypothesisOptions opts;
        opts.convexity_orders = {2, 3};
        const auto rep = homotopy::check_hypotheses(run::homotopy_config(p), p.profile, p.mfld, opts);
        for (const char* name : {"phi_positive", "phi_above_one", "phi_below_one", "phi_decreasing", "phi_convexity_k2",
                                 "phi_convexity_k3", "barrier_a", "barrier_b", "monotone_c"}) {
            const auto* c = rep.find(name);
            const bool ok = c && c->passed && c->margin > 0;
            v.passed = v.passed && ok;
            if (!ok) v.detail += fmt("%s did not pass with positive margin; ", name);
        }
        v.detail += fmt("phibar: monotone_c margin %.3e; ", rep.find("monotone_c")->margin);
    }
    {
        const auto p = setup("barrier_violator.json");
        const auto rep = homotopy::check_hypotheses(run::homotopy_config(p), p.profile, p.mfld);
        const auto* first = rep.first_failure();
        const bool ok = !rep.passed && first && first->name == "barrier_b";
        v.passed = v.passed && ok;
        v.detail += fmt("10 phibar: first failure %s at t = %.4f margin %.4f; ", first ? first->name.c_str() : "none",
                        first ? first->worst_t : NAN, first ? first->margin : NAN);
    }
    {
        const auto p = setup("constant_euclidean.json");
        const auto rep = homotopy::check_hypotheses(run::homotopy_config(p), p.profile, p.mfld);
        const auto* c = rep.find("monotone_c");
        const bool ok = !rep.passed && c && !c->passed;
        v.passed = v.passed && ok;
        v.detail += fmt("constant psi: monotone_c fails at t = %.4f, x = (%.4f, %.4f), margin %.4f", c->worst_t,
                        c->worst_x[0], c->worst_x[1], c->margin);
    }
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / ("weingarten_accept_" + std::to_string(::getpid()));
    const std::pair<const char*, const char*> runs[] = {
        {"slice_recovery.json", "newton"},       {"manufactured_torus1.json", "newton"},
        {"manufactured_torus2.json", "newton"},  {"continuation.json", "solve"},
        {"hypotheses.json", "check"},            {"barrier_violator.json", "check"},
        {"constant_euclidean.json", "check"},
    };
    Verdict v{true, {}};
    long files = 0;
    for (const auto& [name, cmd] : runs) {
        std::string text[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / (rep == 0 ? "first" : "second");
            fs::remove_all(root / "run");
            const std::string line = std::string("\"") + WEINGARTEN_CLI + "\" --config \"" + config_path(name) +
                                     "\" --out \"" + (root / "run").string() + "\" --seed 3 " + cmd + " >\"" +
                                     (root / "stdout.txt").string() + "\" 2>&1";
            fs::create_directories(root);
            const int status = std::system(line.c_str());
            (void)status;
            fs::remove_all(dir);
            fs::rename(root / "run", dir);
            fs::rename(root / "stdout.txt", dir / "stdout.txt");
        }
        for (const auto& e : fs::recursive_directory_iterator(root / "first")) {
            if (!e.is_regular_file()) continue;
            const auto rel = fs::relative(e.path(), root / "first");
            ++files;
            if (slurp(e.path()) != slurp(root / "second" / rel)) {
                v.passed = false;
                v.detail += fmt("%s: %s differs; ", name, rel.string().c_str());
            }
        }
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    v.detail += fmt("%ld output files compared across 7 runs", files);
    v.passed = v.passed && files > 0;
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_seconds;
        std::function<Verdict()> run;
    };
    const Criterion criteria[] = {
        {"symmetric-function suite", 30, symmetric_functions},
        {"geometry exactness", 5, geometry_exactness},
        {"closed-form polar oracle", 10, polar_oracle},
        {"slice recovery", 30, slice_recovery},
        {"manufactured-solution recovery", 120, manufactured},
        {"continuity method end-to-end", 300, continuation},
        {"hypothesis checker", 10, hypotheses},
        {"determinism", 600, determinism},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool ok = v.passed && in_time;
        if (!ok) ++failed;
        std::printf("%s %d %s (%.2f s of %.0f s): %s%s\n", ok ? "PASS" : "FAIL", index, c.name, secs, c.limit_seconds,
                    v.detail.c_str(), in_time ? "" : " [over time limit]");
        std::fflush(stdout);
    }
    return failed;
}
