#pragma once

// Discrete prescribed-curvature equation F(kappa(z)) = Psi on a base grid:
// residual, finite-difference Jacobian with column colouring, a damped Newton
// solver that keeps every iterate admissible, and a priori quantity monitors.

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "weingarten/basegrid.hpp"
#include "weingarten/graphgeom.hpp"
#include "weingarten/psiexpr.hpp"
#include "weingarten/warp.hpp"

namespace weingarten::pde {

using basegrid::BaseManifold;
using basegrid::GridField;
using warp::WarpProfile;

/// Where the prescribed function is evaluated: height t = z(u), chart
/// coordinates of u, normal component nu_t = -h/W, and the node index.
struct PsiPoint {
    double t = 0.0;
    basegrid::Coordinates x{};
    double nu_t = -1.0;
    Eigen::Index node = -1;
};

/// Prescribed curvature psi > 0 as a callable plus a label for reports.
struct Prescribed {
    std::string label;
    std::function<double(const PsiPoint&)> value;
    bool depends_on_normal = false;

    double operator()(const PsiPoint& p) const { return value(p); }
};

/// psi from a parsed expression in t, x1..x_dim, nu_t.
Prescribed expression_psi(const psiexpr::Expression& expr, int dim);
/// psi(t) = C(n,k) kappa(t)^k: every slice solves the equation.
Prescribed umbilic_psi(const WarpProfile& profile, int n, int k);
/// psi taken from grid values by node (t and nu_t ignored).
Prescribed sampled_psi(const GridField& values, std::string label = "sampled");
/// sigma_k(kappa(z*)) at every node, for manufactured-solution runs.
GridField manufacture_psi(const WarpProfile& profile, const BaseManifold& mfld, const GridField& zstar, int k);

struct LineSearchOptions {
    double shrink = 0.5;      ///< backtracking factor
    int max_backtracks = 40;
    double sufficient_decrease = 1e-4;
};

struct SolverOptions {
    double tol_residual = 1e-10;
    int max_newton = 50;
    LineSearchOptions line_search{};
    /// Solve (sigma_k/C)^{1/k} = (psi/C)^{1/k} instead of sigma_k = psi.
    bool normalized = true;
    double fd_step = 1e-6;    ///< relative Jacobian step, scaled by 1 + |z|_inf
    double cone_margin = 0.0; ///< iterates must satisfy sigma_m > margin
    /// Grids above this many nodes use preconditioned GMRES instead of sparse LU.
    Eigen::Index direct_limit = 64 * 64;
    /// Extra full Newton steps after convergence, kept only while |R| strictly decreases.
    int polish_steps = 1;
};

struct SolverState {
    GridField z;
    int k = 1;
    Prescribed psi;
    WarpProfile profile;
    BaseManifold mfld;
    SolverOptions options{};
};

struct Diagnostics {
    int iteration = 0;
    double residual_norm = 0.0;
    double kappa_max = 0.0;
    double gradmax = 0.0;
    double tau_min = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    bool gamma_k_ok = false;
    double min_shape_eigenvalue = 0.0;
    double step_length = 0.0;  ///< accepted line-search fraction (0 for the initial record)
    int pole_rows_flagged = 0; ///< nodes on pole-adjacent rows (first-order stencils)
};

/// Pointwise residual F(kappa) - Psi. Throws AdmissibilityError naming the
/// first node outside Gamma_k, DomainError when z leaves the interval.
GridField residual(const SolverState& state);

/// Residual at a single node for an arbitrary field (same state otherwise).
double residual_at(const SolverState& state, const GridField& z, Eigen::Index node);

/// Greedy distance-2 colouring of Jacobian columns: columns sharing a colour
/// never influence a common residual entry.
struct ColumnColoring {
    std::vector<int> color;                       ///< per column
    std::vector<std::vector<Eigen::Index>> rows;  ///< residual rows touched by each column
    int count = 0;
};
ColumnColoring color_columns(const BaseManifold& mfld);

/// Central-difference Jacobian dR/dz restricted to the stencil footprint.
Eigen::SparseMatrix<double> jacobian(const SolverState& state);
Eigen::SparseMatrix<double> jacobian(const SolverState& state, const ColumnColoring& coloring);

/// Extremal geometry over the grid. Never throws for admissibility; the
/// residual norm is +inf when the state is not admissible.
Diagnostics monitors(const SolverState& state);

struct NewtonResult {
    enum class Status { converged, divergence, singular, iteration_cap };
    Status status = Status::divergence;
    std::string message;
    GridField z;
    std::vector<Diagnostics> history;  ///< initial state plus every accepted iterate
    int iterations = 0;                ///< Newton steps until the tolerance was met, polish excluded
    bool converged() const noexcept { return status == Status::converged; }
};

std::string to_string(NewtonResult::Status status);

/// Damped Newton with backtracking on |R|_inf; trial steps are halved until
/// the iterate is admissible, inside the interval, and decreases the residual.
/// Solver failures are reported in the result. An inadmissible initial state
/// throws AdmissibilityError before any iteration.
NewtonResult newton_iterate(const SolverState& state);

/// As newton_iterate, but throws SolverError unless converged.
NewtonResult newton_solve(const SolverState& state);

}  // namespace weingarten::pde
