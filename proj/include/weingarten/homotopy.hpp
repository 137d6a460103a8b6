#pragma once

// Continuity method from a slice to the target equation: the barrier function
// phi, the interpolating family psi^s, the adaptive continuation driver and a
// sampled checker for the structural hypotheses on psi and phi.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "weingarten/pde.hpp"
#include "weingarten/psiexpr.hpp"
#include "weingarten/warp.hpp"

namespace weingarten::homotopy {

using pde::Prescribed;
using pde::PsiPoint;

/// Barrier function phi(t) with phi(t_0) = 1 at a unique t_0 in (t_minus, t_plus).
struct PhiSpec {
    double t_minus = 0.0;
    double t_plus = 0.0;
    psiexpr::Expression expr;
    double t0 = 0.0;

    double operator()(double t) const { return psiexpr::eval_at_t(expr, t); }
    double derivative(double t) const;
    double second_derivative(double t) const;
};

/// Default expression exp((t_minus + t_plus)/2 - t).
std::string default_phi_expression(double t_minus, double t_plus);

/// Validates phi > 0 on (lo, hi), phi > 1 for t <= t_minus, phi < 1 for
/// t >= t_plus and phi' < 0 on 1000 samples, then bisects for t_0.
/// Throws ValidationError naming the first failing condition and point.
PhiSpec build_phi(double t_minus, double t_plus, double lo, double hi,
                  const std::optional<std::string>& expr = std::nullopt);

enum class Mode { linear, inverse_k_power };
std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct HomotopyConfig {
    Mode mode = Mode::inverse_k_power;
    double initial_step = 0.1;
    double min_step = 1e-3;
    double growth = 1.5;
    double max_step = 0.25;
    Prescribed target;
    PhiSpec phi;
    int k = 2;
};

/// phibar(t) = C(n,k) phi(t) kappa(t)^k, the s = 0 right-hand side.
double barrier_target(const PhiSpec& phi, const warp::WarpProfile& profile, int n, int k, double t);

/// scale * phibar(t) * modulation(t, x, nu_t); modulation defaults to 1.
Prescribed barrier_psi(const PhiSpec& phi, const warp::WarpProfile& profile, int n, int k, double scale = 1.0,
                       const std::optional<psiexpr::Expression>& modulation = std::nullopt);

/// linear:          s psi + (1 - s) phibar
/// inverse_k_power: (s psi^{-1/k} + (1 - s) phibar^{-1/k})^{-k}
/// The endpoints return phibar and psi exactly.
double psi_s(const HomotopyConfig& cfg, const warp::WarpProfile& profile, int n, double s, const PsiPoint& at);
Prescribed homotopy_psi(const HomotopyConfig& cfg, const warp::WarpProfile& profile, int n, double s);

struct StepRecord {
    double s = 0.0;
    int newton_iterations = 0;
    pde::Diagnostics final;                  ///< monitors at the accepted solution
    std::vector<pde::Diagnostics> iterates;  ///< every accepted Newton iterate at this s
};

struct ContinuationResult {
    bool success = false;
    double last_good_s = 0.0;
    std::string message;
    pde::GridField z;
    std::vector<StepRecord> steps;
    int failed_attempts = 0;
};

/// March s from 0 to 1. On Newton success advance and grow the step (capped);
/// on failure halve it and retry from the last accepted field. Fails when the
/// step drops below cfg.min_step. `state.z` should be the slice z = t_0.
ContinuationResult continue_path(const HomotopyConfig& cfg, const pde::SolverState& state);

/// Outcome of one sampled condition. `margin` is the worst signed slack; the
/// condition passes when it is non-negative (positive for strict conditions).
struct ConditionReport {
    std::string name;
    std::string description;
    bool passed = false;
    bool advisory = false;  ///< reported, not part of the overall verdict
    double margin = 0.0;
    double worst_t = 0.0;
    basegrid::Coordinates worst_x{};
    double worst_nu_t = 0.0;
    int samples = 0;
};

struct HypothesisReport {
    std::vector<ConditionReport> conditions;
    bool passed = false;
    const ConditionReport* find(const std::string& name) const;
    /// First failing non-advisory condition, or nullptr.
    const ConditionReport* first_failure() const;
};

struct HypothesisOptions {
    std::vector<double> nu_samples;  ///< empty: 32 values spaced evenly in [-1, -0.05]
    int t_samples = 16;              ///< per barrier region; (c) uses twice this
    std::vector<int> convexity_orders;  ///< orders k for the phi convexity check; empty: {cfg.k}
};

/// Checks on the barrier phi ((i)-(iv), the convexity condition in sphere mode)
/// and on psi: barrier inequalities (a), (b), the monotonicity (c) of h^k psi,
/// and for nu-independent psi in a sphere ambient an advisory surrogate of the
/// convexity condition on psi^{-1/k} (plus the same test for phibar).
HypothesisReport check_hypotheses(const HomotopyConfig& cfg, const warp::WarpProfile& profile,
                                  const basegrid::BaseManifold& mfld, const HypothesisOptions& opts = {});

/// Smallest eigenvalue of the ambient Hessian of f plus lambda f g-bar, in the
/// orthonormal frame (d_t, e_i/h) at every node of the slice t. `f(t, x)`.
double min_ambient_convexity(const std::function<double(double, const basegrid::Coordinates&)>& f,
                             const warp::WarpProfile& profile, const basegrid::BaseManifold& mfld, double t,
                             basegrid::Coordinates* worst = nullptr);

}  // namespace weingarten::homotopy
