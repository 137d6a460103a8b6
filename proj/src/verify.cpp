#include "weingarten/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "weingarten/basegrid.hpp"
#include "weingarten/graphgeom.hpp"
#include "weingarten/symfunc.hpp"
#include "weingarten/warp.hpp"

namespace weingarten::verify {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Collects errors (smaller is better) or slacks of inequalities.
struct Tally {
    SuiteResult r;

    Tally(std::string name, double tol) {
        r.name = std::move(name);
        r.tolerance = tol;
    }
    void error(double e) {
        ++r.samples;
        r.worst = std::max(r.worst, e);
        if (!(e <= r.tolerance)) ++r.violations;
    }
    void inequality(bool holds, double relative_slack) {
        ++r.samples;
        r.worst = std::max(r.worst, -relative_slack);
        if (!holds) ++r.violations;
    }
    SuiteResult done(std::string detail = {}) {
        r.passed = r.violations == 0 && r.samples > 0;
        r.detail = std::move(detail);
        return r;
    }
};

class ConeSampler {
public:
    explicit ConeSampler(std::uint64_t seed) : rng_(seed) {}

    VectorXd kappa(int n, int k) {
        std::uniform_real_distribution<double> v(-1.0, 1.0);
        std::uniform_real_distribution<double> shift(0.0, 1.5);
        for (;;) {
            VectorXd x(n);
            for (int i = 0; i < n; ++i) x(i) = v(rng_);
            x.array() += shift(rng_);
            if (symfunc::in_gamma_k(x, symfunc::ConeQuery{k})) return x;
        }
    }
    VectorXd direction(int n) {
        std::uniform_real_distribution<double> v(-1.0, 1.0);
        VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = v(rng_);
        return x;
    }
    MatrixXd symmetric(int n) {
        MatrixXd b = MatrixXd::NullaryExpr(n, n, [&] { return uniform(-1.0, 1.0); });
        return 0.5 * (b + b.transpose());
    }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
};

double min_gap(const VectorXd& x) {
    VectorXd s = x;
    std::sort(s.data(), s.data() + s.size());
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < s.size(); ++i) gap = std::min(gap, s(i) - s(i - 1));
    return gap;
}

double relative_slack(const symfunc::InequalityReport& r) {
    return (r.lhs - r.rhs) / std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
}

}  // namespace

std::vector<SuiteResult> symfunc_sweeps(std::uint64_t seed, int samples) {
    ConeSampler rng(seed);
    Tally grad("sigma_grad_fd", 1e-6), hess("sigma_hess_fd", 1e-5), euler("euler_identity", 1e-13);
    Tally quad("quad_form_eigenpath", 1e-4), grw("concavity_inequality", 0.0), grw_delta("concavity_inequality_delta", 0.0);
    Tally nm("newton_maclaurin", 0.0);

    for (int n = 2; n <= 4; ++n) {
        for (int s = 0; s < samples; ++s) {
            const int k = rng.integer(1, n);
            const VectorXd x = rng.kappa(n, k);

            // finite differences of sigma and its gradient
            const double step = 1e-5 * (1 + x.cwiseAbs().maxCoeff());
            const VectorXd g = symfunc::sigma_grad(x, k);
            VectorXd fd(n);
            MatrixXd fdh(n, n);
            for (int i = 0; i < n; ++i) {
                VectorXd p = x, m = x;
                p(i) += step;
                m(i) -= step;
                fd(i) = (symfunc::sigma(p, k) - symfunc::sigma(m, k)) / (2 * step);
                fdh.col(i) = (symfunc::sigma_grad(p, k) - symfunc::sigma_grad(m, k)) / (2 * step);
            }
            grad.error((fd - g).cwiseAbs().maxCoeff() / std::max(g.cwiseAbs().maxCoeff(), 1e-300));
            const MatrixXd h = symfunc::sigma_hess(x, k);
            const double hscale = h.cwiseAbs().maxCoeff();
            hess.error(hscale == 0.0 ? fdh.cwiseAbs().maxCoeff() : (fdh - h).cwiseAbs().maxCoeff() / hscale);

            // Euler: sum kappa_i sigma_k^i = k sigma_k, sum_j sigma_k^{ij} kappa_j = (k-1) sigma_k^i
            const double sk = symfunc::sigma(x, k);
            const double lhs = x.dot(g);
            euler.error(std::abs(lhs - k * sk) / std::max((x.cwiseProduct(g)).cwiseAbs().sum(), 1e-300));
            const VectorXd hx = h * x;
            const double escale = std::max((h.cwiseAbs() * x.cwiseAbs()).maxCoeff(), (k - 1) * g.cwiseAbs().maxCoeff());
            if (escale > 0) euler.error((hx - (k - 1) * g).cwiseAbs().maxCoeff() / escale);

            // second derivative of sigma_k(eig(diag(x) + tB)) at t = 0
            if (min_gap(x) >= 0.1) {
                const MatrixXd b = rng.symmetric(n);
                auto f = [&](double t) {
                    const MatrixXd a = MatrixXd(x.asDiagonal()) + t * b;
                    return symfunc::sigma(Eigen::SelfAdjointEigenSolver<MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues(), k);
                };
                auto d2 = [&](double hh) { return (f(hh) - 2 * f(0.0) + f(-hh)) / (hh * hh); };
                const double path = (4 * d2(5e-4) - d2(1e-3)) / 3;
                const double exact = symfunc::quad_form_second_derivative(x, b, k);
                quad.error(std::abs(path - exact) / std::max(std::abs(exact), 1.0));
            }

            // concavity of (sigma_k/sigma_l)^{1/(k-l)} and its delta companion
            const int l = rng.integer(0, k - 1);
            const VectorXd w = rng.direction(n);
            const auto r = symfunc::check_grw_inequality(x, w, k, l);
            grw.inequality(r.holds, relative_slack(r));
            const double delta = rng.uniform(0.05, 3.0);
            const auto rd = symfunc::check_grw_inequality_delta(x, w, k, l, delta);
            grw_delta.inequality(rd.holds, relative_slack(rd));

            if (k <= n - 1) {
                const auto m = symfunc::check_newton_maclaurin(x, k);
                nm.inequality(m.holds, std::min(relative_slack(m.newton), relative_slack(m.maclaurin)));
            }
        }
    }
    return {grad.done(), hess.done(), euler.done(), quad.done(), grw.done(), grw_delta.done(), nm.done()};
}

std::vector<SuiteResult> geometry_identities(std::uint64_t seed, int samples) {
    ConeSampler rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Tally support("support_identity", 1e-13);
    const warp::WarpProfile profiles[] = {warp::WarpProfile::sphere(1.0, 0.05, 1.5),
                                          warp::WarpProfile::euclidean(0.1, 5.0),
                                          warp::WarpProfile::hyperbolic(1.0, 0.1, 3.0)};
    for (const auto& p : profiles) {
        for (int s = 0; s < samples; ++s) {
            const int n = rng.integer(1, 2);
            const double t = rng.uniform(p.t_min() + 1e-3, p.t_max() - 1e-3);
            const basegrid::LocalVector grad = rng.direction(n) * 3.0;
            const basegrid::LocalMatrix hess = rng.symmetric(n) * 3.0;
            const auto pv = p.eval(t);
            const auto f = graphgeom::frame_from_derivatives(pv, t, grad, hess);
            support.error(std::abs(f.tau * f.W - pv.h * pv.h) / (pv.h * pv.h));
        }
    }

    Tally slice("slice_frames", 1e-14);
    const std::pair<warp::WarpProfile, double> slices[] = {{profiles[0], std::numbers::pi / 4},
                                                           {profiles[1], 2.0},
                                                           {profiles[2], 1.0}};
    for (const auto& [p, t] : slices) {
        const auto pv = p.eval(t);
        for (int n = 1; n <= 2; ++n) {
            const auto f = graphgeom::frame_from_derivatives(pv, t, basegrid::LocalVector::Zero(n),
                                                             basegrid::LocalMatrix::Zero(n, n));
            const double kap = pv.hp / pv.h;
            slice.error((f.kappa.array() - kap).abs().maxCoeff() / kap);
            slice.error((f.a - pv.h * pv.hp * basegrid::LocalMatrix::Identity(n, n)).cwiseAbs().maxCoeff() /
                        (pv.h * pv.hp));
            slice.error(std::abs(f.tau - pv.h) / pv.h);
        }
    }
    return {support.done(), slice.done()};
}

std::vector<SuiteResult> convergence_orders() {
    const auto profile = warp::WarpProfile::euclidean(0.5, 4.0);
    // polar curve r(u): kappa = (r^2 + 2 r'^2 - r r'') / (r^2 + r'^2)^{3/2}
    auto exact = [](double u) {
        const double r = 2 + std::cos(u), r1 = -std::sin(u), r2 = -std::cos(u);
        return (r * r + 2 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
    };
    double errors[3];
    const int sizes[3] = {64, 128, 256};
    for (int s = 0; s < 3; ++s) {
        const auto m = basegrid::build_grid({basegrid::BaseKind::torus1, sizes[s], 1});
        const auto z = m.sample([](const basegrid::Coordinates& x) { return 2 + std::cos(x[0]); });
        double e = 0;
        for (Eigen::Index node = 0; node < m.size(); ++node) {
            const auto f = graphgeom::point_geometry(profile, m, z, node, {false});
            e = std::max(e, std::abs(f.kappa(0) - exact(m.coordinates(node)[0])));
        }
        errors[s] = e;
    }
    const double order = std::min(std::log2(errors[0] / errors[1]), std::log2(errors[1] / errors[2]));
    SuiteResult r;
    r.name = "polar_curve_order";
    r.samples = 3;
    r.worst = order;
    r.tolerance = 1.9;
    r.passed = order >= 1.9;
    r.violations = r.passed ? 0 : 1;
    char buf[160];
    std::snprintf(buf, sizeof buf, "errors %.3e %.3e %.3e", errors[0], errors[1], errors[2]);
    r.detail = buf;
    return {r};
}

std::vector<SuiteResult> run_all(std::uint64_t seed, int samples) {
    auto out = symfunc_sweeps(seed, samples);
    for (auto& r : geometry_identities(seed, std::max(1, samples / 10))) out.push_back(std::move(r));
    for (auto& r : convergence_orders()) out.push_back(std::move(r));
    return out;
}

}  // namespace weingarten::verify
