#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "weingarten/errors.hpp"
#include "weingarten/graphgeom.hpp"

using namespace weingarten;
using basegrid::BaseKind;
using basegrid::Coordinates;
using basegrid::GridField;
using basegrid::LocalMatrix;
using basegrid::LocalVector;
using warp::WarpProfile;
constexpr double pi = std::numbers::pi;

TEST_CASE("slice frames") {
    const auto p = WarpProfile::sphere(1.0, 0.05, 1.5);
    const auto m = basegrid::build_grid({BaseKind::sphere2, 8, 16});
    const GridField z(m, pi / 4);
    for (Eigen::Index node = 0; node < m.size(); ++node) {
        const auto f = graphgeom::point_geometry(p, m, z, node);
        CHECK((f.g - 0.5 * LocalMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((f.a - 0.5 * LocalMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(f.tau == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
        CHECK(f.nu_t == -1.0);
        CHECK(std::abs(f.kappa(0) - 1.0) <= 1e-15);
        CHECK(std::abs(f.kappa(1) - 1.0) <= 1e-15);
    }
    const WarpProfile others[] = {WarpProfile::euclidean(0.1, 5), WarpProfile::hyperbolic(1.0, 0.1, 3)};
    const double heights[] = {2.0, 1.0};
    for (int i = 0; i < 2; ++i) {
        const auto pv = others[i].eval(heights[i]);
        const auto t2 = basegrid::build_grid({BaseKind::torus2, 8, 8});
        const auto f = graphgeom::point_geometry(others[i], t2, GridField(t2, heights[i]), 3);
        CHECK((f.kappa.array() - pv.hp / pv.h).abs().maxCoeff() <= 1e-15 * pv.hp / pv.h);
        CHECK((f.a - pv.h * pv.hp * LocalMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15 * pv.h * pv.hp);
        CHECK(f.tau == pv.h);
    }
}

TEST_CASE("hand-evaluated frame for 2 + cos u") {
    const auto p = WarpProfile::euclidean(0.5, 4);
    const auto pv = p.eval(3.0);
    LocalVector g(1);
    g << 0.0;
    LocalMatrix h(1, 1);
    h << -1.0;
    const auto f = graphgeom::frame_from_derivatives(pv, 3.0, g, h);
    CHECK(f.W == 3.0);
    CHECK(f.g(0, 0) == 9.0);
    CHECK(f.a(0, 0) == doctest::Approx(4.0));
    CHECK(f.kappa(0) == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("euclidean circle of radius r") {
    const auto p = WarpProfile::euclidean(0.1, 5);
    const auto m = basegrid::build_grid({BaseKind::sphere2, 8, 16});
    const auto f = graphgeom::point_geometry(p, m, GridField(m, 1.7), 20);
    CHECK(f.kappa(0) == doctest::Approx(1 / 1.7));
    CHECK(f.kappa(1) == doctest::Approx(1 / 1.7));
}

TEST_CASE("support identity on random points") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3, 3);
    const WarpProfile profiles[] = {WarpProfile::sphere(1.0, 0.05, 1.5), WarpProfile::euclidean(0.1, 5),
                                    WarpProfile::hyperbolic(2.0, 0.1, 2)};
    for (const auto& p : profiles)
        for (int rep = 0; rep < 500; ++rep) {
            const int n = 1 + rep % 2;
            const double t = p.t_min() + (p.t_max() - p.t_min()) * (0.01 + 0.98 * (u(rng) + 3) / 6);
            LocalVector g(n);
            LocalMatrix h(n, n);
            for (int i = 0; i < n; ++i) g(i) = u(rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = u(rng);
            const auto pv = p.eval(t);
            const auto f = graphgeom::frame_from_derivatives(pv, t, g, h);
            CHECK(std::abs(f.tau * f.W - pv.h * pv.h) <= 1e-13 * pv.h * pv.h);
            CHECK(f.nu_t == doctest::Approx(-pv.h / f.W));
            CHECK((graphgeom::principal_curvatures(f) - f.kappa).cwiseAbs().maxCoeff() <=
                  1e-12 * (1 + f.kappa.cwiseAbs().maxCoeff()));
            // shape operator eigenvalues against a generalized eigensolver
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(f.a, f.g);
            Eigen::VectorXd ref = ges.eigenvalues().reverse();
            CHECK((ref - f.kappa).cwiseAbs().maxCoeff() <= 1e-10 * (1 + ref.cwiseAbs().maxCoeff()));
        }
}

TEST_CASE("polar-curve oracle on the circle") {
    const auto p = WarpProfile::euclidean(0.5, 4);
    std::vector<double> errs;
    for (int size : {64, 128, 256}) {
        const auto m = basegrid::build_grid({BaseKind::torus1, size, 1});
        const auto z = m.sample([](const Coordinates& x) { return 2 + std::cos(x[0]); });
        double e = 0;
        for (Eigen::Index node = 0; node < m.size(); ++node) {
            const double u = m.coordinates(node)[0];
            const double ref = oracle::polar_curvature(2 + std::cos(u), -std::sin(u), -std::cos(u));
            e = std::max(e, std::abs(graphgeom::point_geometry(p, m, z, node).kappa(0) - ref));
        }
        errs.push_back(e);
        if (size == 256) {
            CHECK(graphgeom::point_geometry(p, m, z, 0).kappa(0) == doctest::Approx(4.0 / 9.0).epsilon(1e-3));
        }
    }
    CHECK(oracle::observed_order(errs) >= 1.9);
}

// Geodesic curvature of a latitude-type curve on the unit sphere, computed from
// its embedding in R^3. Frozen values from a symbolic evaluation of the oracle.
TEST_CASE("sphere curve oracle") {
    CHECK(oracle::sphere_curve_curvature(0.0, 0.85, 0.0, -0.1) == doctest::Approx(1.0556501063471528534).epsilon(1e-14));
    CHECK(oracle::sphere_curve_curvature(pi / 3, 0.75 + 0.05, -0.1 * std::sin(pi / 3), -0.05) ==
          doctest::Approx(1.0731413795165280669).epsilon(1e-14));

    const auto p = WarpProfile::sphere(1.0, 0.05, 1.5);
    auto z = [](double u) { return 0.75 + 0.1 * std::cos(u); };
    std::vector<double> errs;
    for (int size : {64, 128, 256}) {
        const auto m = basegrid::build_grid({BaseKind::torus1, size, 1});
        const auto zf = m.sample([&](const Coordinates& x) { return z(x[0]); });
        double e = 0;
        for (Eigen::Index node = 0; node < m.size(); ++node) {
            const double u = m.coordinates(node)[0];
            const double ref = oracle::sphere_curve_curvature(u, z(u), -0.1 * std::sin(u), -0.1 * std::cos(u));
            e = std::max(e, std::abs(graphgeom::point_geometry(p, m, zf, node).kappa(0) - ref));
        }
        errs.push_back(e);
    }
    CHECK(errs.back() < 1e-4);
    CHECK(oracle::observed_order(errs) >= 1.9);
}

TEST_CASE("translation on the torus permutes frames") {
    const auto p = WarpProfile::euclidean(0.1, 5);
    const auto m = basegrid::build_grid({BaseKind::torus2, 16, 16});
    const auto z = m.sample([](const Coordinates& x) { return 1.5 + 0.1 * std::sin(x[0]) * std::cos(2 * x[1]); });
    GridField shifted(m);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) shifted[m.node(i, j)] = z[m.node((i + 3) % 16, (j + 5) % 16)];
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            const auto a = graphgeom::point_geometry(p, m, shifted, m.node(i, j));
            const auto b = graphgeom::point_geometry(p, m, z, m.node((i + 3) % 16, (j + 5) % 16));
            CHECK(a.kappa == b.kappa);
            CHECK(a.tau == b.tau);
        }
}

TEST_CASE("eta gradient identity") {
    // grad (eta o z) = -h(z) grad z, checked against the discrete gradient of the pulled-back field
    const auto p = WarpProfile::sphere(1.0, 0.05, 1.5);
    std::vector<double> errs;
    for (int size : {16, 32, 64}) {
        const auto m = basegrid::build_grid({BaseKind::torus2, size, size});
        const auto z = m.sample([](const Coordinates& x) { return 0.8 + 0.1 * std::cos(x[0]) * std::sin(x[1]); });
        GridField eta(m);
        for (Eigen::Index i = 0; i < m.size(); ++i) eta[i] = p.eta(z[i]);
        double e = 0;
        for (Eigen::Index node = 0; node < m.size(); ++node) {
            const auto x = m.coordinates(node);
            LocalVector exact(2);
            exact << -0.1 * std::sin(x[0]) * std::sin(x[1]), 0.1 * std::cos(x[0]) * std::cos(x[1]);
            exact *= -p.eval(z[node]).h;
            e = std::max(e, (m.covariant_data(eta, node).grad - exact).cwiseAbs().maxCoeff());
        }
        errs.push_back(e);
    }
    CHECK(oracle::observed_order(errs) >= 1.9);
}

TEST_CASE("monitors") {
    const auto p = WarpProfile::sphere(1.0, 0.05, 1.5);
    const auto m = basegrid::build_grid({BaseKind::sphere2, 8, 16});
    const auto slice = graphgeom::support_and_gradient_monitor(p, m, GridField(m, 0.6));
    CHECK(slice.gradmax == 0.0);
    CHECK(slice.tau_min == doctest::Approx(std::sin(0.6)));
    CHECK(slice.z_min == 0.6);
    CHECK(slice.z_max == 0.6);

    const auto e = WarpProfile::euclidean(0.1, 5);
    const auto t1 = basegrid::build_grid({BaseKind::torus1, 256, 1});
    const auto mon = graphgeom::support_and_gradient_monitor(
        e, t1, t1.sample([](const Coordinates& x) { return 0.75 + 0.05 * std::cos(x[0]); }));
    CHECK(mon.z_min == doctest::Approx(0.70));
    CHECK(mon.z_max == doctest::Approx(0.80));
    CHECK(mon.gradmax == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(mon.tau_min > 0);
}

TEST_CASE("errors") {
    const auto p = WarpProfile::sphere(1.0, 0.05, 1.5);
    const auto m = basegrid::build_grid({BaseKind::torus1, 8, 1});
    CHECK_THROWS_AS(graphgeom::point_geometry(p, m, GridField(m, 1.6), 0), DomainError);
    LocalVector g = LocalVector::Zero(1);
    LocalMatrix h = LocalMatrix::Zero(1, 1);
    CHECK_THROWS_AS(graphgeom::shape_eigenvalues(0.0, g, h), GeometryError);
}
