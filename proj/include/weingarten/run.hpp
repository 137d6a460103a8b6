#pragma once

// Run configuration (JSON), problem assembly and the subcommand drivers used by
// the command-line tool. Every output file is written with %.17g floats so
// identical configurations produce identical bytes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "weingarten/basegrid.hpp"
#include "weingarten/graphgeom.hpp"
#include "weingarten/homotopy.hpp"
#include "weingarten/pde.hpp"
#include "weingarten/warp.hpp"

namespace weingarten::run {

enum class PsiFamily { expr, barrier, umbilic, manufactured };
std::string to_string(PsiFamily family);

struct AmbientConfig {
    warp::AmbientKind kind = warp::AmbientKind::sphere;
    double lambda = 1.0;
    double t_min = 0.05;
    double t_max = 1.5;
    std::string h, hp, hpp;  ///< custom profiles only
};

struct PsiConfig {
    PsiFamily family = PsiFamily::barrier;
    std::string expr;        ///< family expr: psi(t, x1.., nu_t)
    double scale = 1.0;      ///< family barrier: multiplies phibar
    std::string modulation;  ///< family barrier: optional factor in (t, x, nu_t)
    std::string zstar;       ///< family manufactured: z*(x1, x2)
};

struct PhiConfig {
    double t_minus = 0.3;
    double t_plus = 1.2;
    std::string expr;  ///< empty: exp((t_minus + t_plus)/2 - t)
};

struct HomotopyParams {
    homotopy::Mode mode = homotopy::Mode::inverse_k_power;
    double step = 0.1;
    double min_step = 1e-3;
    double max_step = 0.25;
    double growth = 1.5;
};

struct SolverParams {
    double tol_residual = 1e-10;
    int max_newton = 50;
    bool normalized = true;
    int polish_steps = 1;
    std::optional<double> initial;  ///< constant start for `newton`; default t_0
};

struct VerifyParams {
    int samples = 10000;  ///< per dimension and sweep
};

struct RunConfig {
    AmbientConfig ambient;
    basegrid::GridSpec base{basegrid::BaseKind::sphere2, 16, 32};
    int k = 2;
    PsiConfig psi;
    PhiConfig phi;
    HomotopyParams homotopy;
    SolverParams solver;
    VerifyParams verify;
    std::string output = "out";
    std::uint64_t seed = 0;
};

/// Throws ConfigError (with key path) for unknown or invalid keys and
/// ParseError for malformed JSON or expressions.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Fully defaulted configuration as JSON text.
std::string echo_config(const RunConfig& cfg);

/// Assembled objects for a run.
struct Problem {
    RunConfig config;
    warp::WarpProfile profile;
    basegrid::BaseManifold mfld;
    int n = 1;
    std::optional<homotopy::PhiSpec> phi;
    pde::Prescribed psi;
    std::optional<basegrid::GridField> zstar;  ///< manufactured family
};

/// Builds profile, grid, phi (when the family or `need_phi` requires it) and psi.
/// ConfigError for inconsistent settings such as k > n; ValidationError when phi
/// violates its conditions.
Problem build_problem(const RunConfig& cfg, bool need_phi);

homotopy::HomotopyConfig homotopy_config(const Problem& p);
pde::SolverOptions solver_options(const RunConfig& cfg);

/// Exit codes of the subcommands.
enum ExitCode : int { ok = 0, failure = 1, config_error = 2, hypothesis_failure = 3, solver_failure = 4 };

int run_solve(const RunConfig& cfg, std::ostream& log);
int run_newton(const RunConfig& cfg, std::ostream& log);
int run_check(const RunConfig& cfg, std::ostream& out);
int run_verify(const RunConfig& cfg, std::ostream& out);
/// PointFrame of the slice z = t (default t_0) at node 0.
int run_slice(const RunConfig& cfg, std::optional<double> t, std::ostream& out);
/// PointFrame at `node` for a field read from a solution.csv file.
int run_inspect(const RunConfig& cfg, const std::string& field_path, long node, std::ostream& out);

/// solution.csv reader/writer: "# shape: m1 m2" then one value per line.
void write_field(const std::string& path, const basegrid::GridField& z);
basegrid::GridField read_field(const std::string& path);

/// JSON text of a PointFrame (keys t, h, hp, W, g, a, kappa, tau, eta, nu_t).
std::string frame_json(const graphgeom::PointFrame& f);

}  // namespace weingarten::run
