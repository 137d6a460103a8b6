#pragma once

// Seeded property sweeps behind the `verify` subcommand: symmetric-function
// identities and inequalities, pointwise geometry identities, and observed
// grid-convergence orders.

#include <cstdint>
#include <string>
#include <vector>

namespace weingarten::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    long samples = 0;
    long violations = 0;
    double worst = 0.0;      ///< worst observed error (or smallest order for convergence suites)
    double tolerance = 0.0;
    std::string detail;
};

/// For n in {2, 3, 4} and every k <= n, `samples` draws from Gamma_k per n:
/// gradient and Hessian finite-difference consistency, Euler identities, the
/// second-derivative formula along eigenvalue paths (gaps >= 0.1), the
/// concavity inequality and its delta form, and Newton-Maclaurin.
std::vector<SuiteResult> symfunc_sweeps(std::uint64_t seed, int samples);

/// tau W = h^2 on random graph points, and slice frames for the sphere
/// (t = pi/4), euclidean (t = 2) and hyperbolic (t = 1) profiles.
std::vector<SuiteResult> geometry_identities(std::uint64_t seed, int samples);

/// Curvature of z = 2 + cos u in the plane against the polar-curve formula on
/// grids 64/128/256; the observed order must be at least 1.9.
std::vector<SuiteResult> convergence_orders();

std::vector<SuiteResult> run_all(std::uint64_t seed, int samples);

}  // namespace weingarten::verify
