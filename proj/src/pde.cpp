#include "weingarten/pde.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <limits>

#include "weingarten/errors.hpp"
#include "weingarten/parallel.hpp"
#include "weingarten/symfunc.hpp"

namespace weingarten::pde {

namespace {

std::string describe_node(const BaseManifold& mfld, Eigen::Index node) {
    return "node " + std::to_string(node) + " (row " + std::to_string(mfld.row_of(node)) + ", col " +
           std::to_string(mfld.col_of(node)) + ")";
}

void check_order(const SolverState& s) {
    if (s.k < 1 || s.k > s.mfld.dimension())
        throw DomainError("curvature order k=" + std::to_string(s.k) + " outside [1, " +
                          std::to_string(s.mfld.dimension()) + "]");
    if (!s.z.matches(s.mfld)) throw DomainError("height field shape does not match the base grid");
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

Prescribed expression_psi(const psiexpr::Expression& expr, int dim) {
    for (const auto& v : expr.free_variables())
        if (v.kind == psiexpr::Variable::Kind::x && v.index > dim)
            throw DomainError("psi expression uses " + v.name() + " but the base has dimension " + std::to_string(dim));
    Prescribed p;
    p.label = expr.source();
    p.depends_on_normal = expr.depends_on(psiexpr::Variable::normal());
    p.value = [expr, dim](const PsiPoint& q) {
        psiexpr::Bindings b;
        b.t = q.t;
        b.nu_t = q.nu_t;
        for (int i = 0; i < dim; ++i) b.x[static_cast<std::size_t>(i)] = q.x[static_cast<std::size_t>(i)];
        return expr.eval(b);
    };
    return p;
}

Prescribed umbilic_psi(const WarpProfile& profile, int n, int k) {
    Prescribed p;
    p.label = "umbilic";
    const double c = symfunc::binomial(n, k);
    p.value = [profile, c, k](const PsiPoint& q) { return c * std::pow(profile.slice_curvature(q.t), k); };
    return p;
}

Prescribed sampled_psi(const GridField& values, std::string label) {
    Prescribed p;
    p.label = std::move(label);
    p.value = [v = values.values()](const PsiPoint& q) {
        if (q.node < 0 || q.node >= v.size()) throw DomainError("sampled psi evaluated off the grid");
        return v(q.node);
    };
    return p;
}

GridField manufacture_psi(const WarpProfile& profile, const BaseManifold& mfld, const GridField& zstar, int k) {
    GridField out(mfld);
    for (Eigen::Index node = 0; node < mfld.size(); ++node) {
        const auto frame = graphgeom::point_geometry(profile, mfld, zstar, node, {false});
        out[node] = symfunc::sigma(frame.kappa, k);
    }
    return out;
}

double residual_at(const SolverState& state, const GridField& z, Eigen::Index node) {
    const auto frame = graphgeom::point_geometry(state.profile, state.mfld, z, node, {false});
    const int k = state.k;
    const auto e = symfunc::elementary_symmetric(frame.kappa, k);
    for (int m = 1; m <= k; ++m) {
        if (!(e(m) > state.options.cone_margin) || !std::isfinite(e(m)))
            throw AdmissibilityError("principal curvatures leave Gamma_" + std::to_string(k) + " at " +
                                     describe_node(state.mfld, node));
    }
    const double psi = state.psi(PsiPoint{frame.t, state.mfld.coordinates(node), frame.nu_t, node});
    if (!state.options.normalized) return e(k) - psi;
    if (!(psi > 0.0))
        throw DomainError("psi must be positive, got " + std::to_string(psi) + " at " + describe_node(state.mfld, node));
    const double c = symfunc::binomial(static_cast<int>(frame.kappa.size()), k);
    return std::pow(e(k) / c, 1.0 / k) - std::pow(psi / c, 1.0 / k);
}

GridField residual(const SolverState& state) {
    check_order(state);
    GridField r(state.mfld);
    parallel_for(state.mfld.size(), [&](Eigen::Index node) { r[node] = residual_at(state, state.z, node); });
    return r;
}

ColumnColoring color_columns(const BaseManifold& mfld) {
    const Eigen::Index n = mfld.size();
    std::vector<std::vector<Eigen::Index>> deps(static_cast<std::size_t>(n));
    ColumnColoring out;
    out.rows.assign(static_cast<std::size_t>(n), {});
    for (Eigen::Index i = 0; i < n; ++i) {
        deps[static_cast<std::size_t>(i)] = mfld.stencil(i);
        for (Eigen::Index j : deps[static_cast<std::size_t>(i)]) out.rows[static_cast<std::size_t>(j)].push_back(i);
    }
    out.color.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> stamp;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i : out.rows[static_cast<std::size_t>(j)])
            for (Eigen::Index other : deps[static_cast<std::size_t>(i)]) {
                const int c = out.color[static_cast<std::size_t>(other)];
                if (c >= 0) {
                    if (static_cast<int>(stamp.size()) <= c) stamp.resize(static_cast<std::size_t>(c) + 1, -1);
                    stamp[static_cast<std::size_t>(c)] = static_cast<int>(j);
                }
            }
        int c = 0;
        while (c < static_cast<int>(stamp.size()) && stamp[static_cast<std::size_t>(c)] == static_cast<int>(j)) ++c;
        out.color[static_cast<std::size_t>(j)] = c;
        out.count = std::max(out.count, c + 1);
    }
    return out;
}

Eigen::SparseMatrix<double> jacobian(const SolverState& state) { return jacobian(state, color_columns(state.mfld)); }

Eigen::SparseMatrix<double> jacobian(const SolverState& state, const ColumnColoring& coloring) {
    check_order(state);
    const Eigen::Index n = state.mfld.size();
    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(coloring.count));
    for (Eigen::Index j = 0; j < n; ++j) members[static_cast<std::size_t>(coloring.color[static_cast<std::size_t>(j)])].push_back(j);

    const double base_step = state.options.fd_step * (1.0 + max_abs(state.z.values()));
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<Eigen::Index> row_owner(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> touched;
    Eigen::VectorXd plus(n), minus(n);

    for (const auto& cols : members) {
        touched.clear();
        for (Eigen::Index j : cols)
            for (Eigen::Index i : coloring.rows[static_cast<std::size_t>(j)]) {
                row_owner[static_cast<std::size_t>(i)] = j;
                touched.push_back(i);
            }
        double step = base_step;
        for (int attempt = 0;; ++attempt) {
            GridField zp = state.z;
            GridField zm = state.z;
            for (Eigen::Index j : cols) {
                zp[j] += step;
                zm[j] -= step;
            }
            try {
                parallel_for(static_cast<Eigen::Index>(touched.size()), [&](Eigen::Index r) {
                    const Eigen::Index i = touched[static_cast<std::size_t>(r)];
                    plus(i) = residual_at(state, zp, i);
                    minus(i) = residual_at(state, zm, i);
                });
                break;
            } catch (const AdmissibilityError&) {
                if (attempt >= 3) throw;
                step *= 0.1;
            } catch (const DomainError&) {
                if (attempt >= 3) throw;
                step *= 0.1;
            }
        }
        for (Eigen::Index i : touched)
            triplets.emplace_back(i, row_owner[static_cast<std::size_t>(i)], (plus(i) - minus(i)) / (2.0 * step));
    }
    Eigen::SparseMatrix<double> jac(n, n);
    jac.setFromTriplets(triplets.begin(), triplets.end());
    jac.makeCompressed();
    return jac;
}

Diagnostics monitors(const SolverState& state) {
    check_order(state);
    Diagnostics d;
    d.kappa_max = -std::numeric_limits<double>::infinity();
    d.min_shape_eigenvalue = std::numeric_limits<double>::infinity();
    d.tau_min = std::numeric_limits<double>::infinity();
    d.z_min = std::numeric_limits<double>::infinity();
    d.z_max = -std::numeric_limits<double>::infinity();
    d.gamma_k_ok = true;
    bool inside = true;
    for (Eigen::Index node = 0; node < state.mfld.size(); ++node) {
        const double t = state.z[node];
        d.z_min = std::min(d.z_min, t);
        d.z_max = std::max(d.z_max, t);
        if (state.mfld.pole_adjacent(node)) ++d.pole_rows_flagged;
        if (!state.profile.contains(t)) {
            inside = false;
            d.gamma_k_ok = false;
            continue;
        }
        const auto f = graphgeom::point_geometry(state.profile, state.mfld, state.z, node, {false});
        d.kappa_max = std::max(d.kappa_max, f.kappa(0));
        d.min_shape_eigenvalue = std::min(d.min_shape_eigenvalue, f.kappa(f.kappa.size() - 1));
        d.gradmax = std::max(d.gradmax, f.grad.norm());
        d.tau_min = std::min(d.tau_min, f.tau);
        if (!symfunc::in_gamma_k(f.kappa, symfunc::ConeQuery{state.k, true, state.options.cone_margin}))
            d.gamma_k_ok = false;
    }
    d.residual_norm = std::numeric_limits<double>::infinity();
    if (inside && d.gamma_k_ok) {
        try {
            d.residual_norm = max_abs(residual(state).values());
        } catch (const std::exception&) {
        }
    }
    return d;
}

std::string to_string(NewtonResult::Status status) {
    switch (status) {
        case NewtonResult::Status::converged: return "converged";
        case NewtonResult::Status::divergence: return "divergence";
        case NewtonResult::Status::singular: return "singular";
        case NewtonResult::Status::iteration_cap: return "iteration_cap";
    }
    return "?";
}

namespace {

bool solve_linear(const Eigen::SparseMatrix<double>& jac, const Eigen::VectorXd& rhs, Eigen::Index direct_limit,
                  Eigen::VectorXd& out) {
    if (jac.rows() <= direct_limit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(jac);
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) return false;
        out = lu.solve(rhs);
        return lu.info() == Eigen::Success && out.allFinite();
    }
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.preconditioner().setDroptol(1e-6);
    gmres.preconditioner().setFillfactor(20);
    gmres.set_restart(60);
    gmres.setTolerance(1e-13);
    gmres.setMaxIterations(2000);
    gmres.compute(jac);
    if (gmres.info() != Eigen::Success) return false;
    out = gmres.solve(rhs);
    return gmres.info() == Eigen::Success && out.allFinite();
}

bool inside_interval(const WarpProfile& p, const GridField& z) {
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (!p.contains(z[i])) return false;
    return true;
}

Diagnostics record(const SolverState& at, int iteration, double residual_norm, double step) {
    Diagnostics d = monitors(at);
    d.iteration = iteration;
    d.residual_norm = residual_norm;
    d.step_length = step;
    return d;
}

}  // namespace

NewtonResult newton_iterate(const SolverState& state) {
    check_order(state);
    const SolverOptions& opt = state.options;
    SolverState cur = state;
    NewtonResult result;

    GridField r = residual(cur);
    double norm = max_abs(r.values());
    result.history.push_back(record(cur, 0, norm, 0.0));
    const ColumnColoring coloring = color_columns(cur.mfld);

    // One Newton direction from `cur`; false when the linear system fails.
    auto direction = [&](Eigen::VectorXd& delta) {
        const Eigen::SparseMatrix<double> jac = jacobian(cur, coloring);
        return solve_linear(jac, -r.values(), opt.direct_limit, delta);
    };
    auto try_step = [&](const Eigen::VectorXd& delta, double alpha, GridField& trial_r) {
        SolverState trial = cur;
        trial.z.values() = cur.z.values() + alpha * delta;
        if (!inside_interval(cur.profile, trial.z)) return std::optional<SolverState>{};
        try {
            trial_r = residual(trial);
        } catch (const AdmissibilityError&) {
            return std::optional<SolverState>{};
        } catch (const DomainError&) {
            return std::optional<SolverState>{};
        }
        return std::optional<SolverState>{std::move(trial)};
    };

    int iteration = 0;
    while (norm > opt.tol_residual) {
        if (iteration >= opt.max_newton) {
            result.status = NewtonResult::Status::iteration_cap;
            result.message = "no convergence within " + std::to_string(opt.max_newton) + " Newton iterations";
            result.z = cur.z;
            return result;
        }
        Eigen::VectorXd delta;
        if (!direction(delta)) {
            result.status = NewtonResult::Status::singular;
            result.message = "Jacobian solve failed at iteration " + std::to_string(iteration + 1);
            result.z = cur.z;
            return result;
        }
        double alpha = 1.0;
        bool accepted = false;
        for (int b = 0; b <= opt.line_search.max_backtracks; ++b, alpha *= opt.line_search.shrink) {
            GridField trial_r;
            auto trial = try_step(delta, alpha, trial_r);
            if (!trial) continue;
            const double trial_norm = max_abs(trial_r.values());
            if (trial_norm < (1.0 - opt.line_search.sufficient_decrease * alpha) * norm) {
                cur = std::move(*trial);
                r = std::move(trial_r);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        ++iteration;
        if (!accepted) {
            result.status = NewtonResult::Status::divergence;
            result.message = "no admissible decreasing step at iteration " + std::to_string(iteration);
            result.z = cur.z;
            return result;
        }
        result.history.push_back(record(cur, iteration, norm, alpha));
    }
    result.iterations = iteration;

    for (int p = 0; p < opt.polish_steps; ++p) {
        Eigen::VectorXd delta;
        if (!direction(delta)) break;
        GridField trial_r;
        auto trial = try_step(delta, 1.0, trial_r);
        if (!trial) break;
        const double trial_norm = max_abs(trial_r.values());
        if (!(trial_norm < norm)) break;
        cur = std::move(*trial);
        r = std::move(trial_r);
        norm = trial_norm;
        ++iteration;
        result.history.push_back(record(cur, iteration, norm, 1.0));
    }

    result.status = NewtonResult::Status::converged;
    result.message = "converged";
    result.z = cur.z;
    return result;
}

NewtonResult newton_solve(const SolverState& state) {
    NewtonResult result = newton_iterate(state);
    if (!result.converged()) {
        const auto kind = result.status == NewtonResult::Status::singular        ? SolverError::Kind::singular
                          : result.status == NewtonResult::Status::iteration_cap ? SolverError::Kind::iteration_cap
                                                                                 : SolverError::Kind::divergence;
        throw SolverError(kind, result.message);
    }
    return result;
}

}  // namespace weingarten::pde
