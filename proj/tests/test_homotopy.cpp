#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "weingarten/errors.hpp"
#include "weingarten/homotopy.hpp"
#include "weingarten/symfunc.hpp"

using namespace weingarten;
using basegrid::BaseKind;
using basegrid::Coordinates;
using basegrid::GridField;
using homotopy::HomotopyConfig;
using homotopy::Mode;
using pde::PsiPoint;
using warp::WarpProfile;
constexpr double pi = std::numbers::pi;

namespace {

const WarpProfile sphere = WarpProfile::sphere(1.0, 0.05, 1.5);

HomotopyConfig sphere_config(double scale, Mode mode, const char* modulation = nullptr) {
    HomotopyConfig c;
    c.mode = mode;
    c.k = 2;
    c.phi = homotopy::build_phi(0.3, 1.2, sphere.t_min(), sphere.t_max());
    std::optional<psiexpr::Expression> mod;
    if (modulation) mod = psiexpr::Expression::parse(modulation);
    c.target = homotopy::barrier_psi(c.phi, sphere, 2, 2, scale, mod);
    return c;
}

pde::SolverState slice_state(const HomotopyConfig& c, int rows) {
    const auto m = basegrid::build_grid({BaseKind::sphere2, rows, 2 * rows});
    return pde::SolverState{GridField(m, c.phi.t0), c.k, c.target, sphere, m};
}

}  // namespace

TEST_CASE("barrier function construction") {
    const auto phi = homotopy::build_phi(0.3, 1.2, 0.05, 1.5);
    CHECK(phi.t0 == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(phi(phi.t0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi.derivative(0.9) == doctest::Approx(-std::exp(0.75 - 0.9)).epsilon(1e-9));
    CHECK(phi.second_derivative(0.9) == doctest::Approx(std::exp(0.75 - 0.9)).epsilon(1e-6));
    CHECK(homotopy::default_phi_expression(0.3, 1.2).find("exp(") == 0);

    const auto custom = homotopy::build_phi(0.2, 1.0, 0.05, 1.5, std::string("exp(1 - 2*t)"));
    CHECK(custom.t0 == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(homotopy::build_phi(0.5, 1.5, 0.0, 2.0, std::string("1 - t")), ValidationError);
    CHECK_THROWS_AS(homotopy::build_phi(0.5, 1.5, 0.0, 2.0, std::string("exp(1 - t)*x1")), DomainError);
    CHECK_THROWS_AS(homotopy::build_phi(1.2, 0.3, 0.05, 1.5), DomainError);
    CHECK_THROWS_AS(homotopy::build_phi(0.01, 1.2, 0.05, 1.5), DomainError);
    // increasing phi violates the monotonicity requirement
    CHECK_THROWS_AS(homotopy::build_phi(0.3, 1.2, 0.05, 1.5, std::string("exp(t - 0.75)")), ValidationError);
}

TEST_CASE("mode names") {
    CHECK(homotopy::mode_from_string("linear") == Mode::linear);
    CHECK(homotopy::mode_from_string("inverse_k_power") == Mode::inverse_k_power);
    CHECK(homotopy::to_string(Mode::linear) == "linear");
    CHECK_THROWS_AS(homotopy::mode_from_string("cubic"), DomainError);
}

TEST_CASE("homotopy right-hand side") {
    for (Mode mode : {Mode::linear, Mode::inverse_k_power}) {
        const auto c = sphere_config(3.0, mode, "1 + 0.2*sin(x1)");
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> t(0.1, 1.4), x(0, pi);
        for (int i = 0; i < 200; ++i) {
            PsiPoint q{t(rng), {x(rng), 2 * x(rng)}, -1.0, -1};
            const double bar = homotopy::barrier_target(c.phi, sphere, 2, 2, q.t);
            const double psi = c.target(q);
            CHECK(std::abs(homotopy::psi_s(c, sphere, 2, 0.0, q) - bar) <= 1e-14 * bar);
            CHECK(std::abs(homotopy::psi_s(c, sphere, 2, 1.0, q) - psi) <= 1e-14 * psi);
            double prev = bar;
            for (int j = 1; j <= 10; ++j) {
                const double v = homotopy::psi_s(c, sphere, 2, j / 10.0, q);
                // mixing moves monotonically from phibar toward psi
                CHECK((psi - bar) * (v - prev) >= 0);
                prev = v;
            }
            const double half = homotopy::psi_s(c, sphere, 2, 0.5, q);
            if (mode == Mode::linear) {
                CHECK(half == doctest::Approx(0.5 * (psi + bar)).epsilon(1e-14));
            } else {
                CHECK(half == doctest::Approx(std::pow(0.5 / std::sqrt(psi) + 0.5 / std::sqrt(bar), -2)).epsilon(1e-14));
            }
        }
        // equal endpoints are a fixed point of the mixing
        const auto same = sphere_config(1.0, mode);
        for (double s : {0.25, 0.5, 0.75}) {
            PsiPoint q{0.6, {1.0, 1.0}, -1.0, -1};
            const double bar = homotopy::barrier_target(c.phi, sphere, 2, 2, 0.6);
            CHECK(homotopy::psi_s(same, sphere, 2, s, q) == doctest::Approx(bar).epsilon(1e-14));
        }
    }
    auto bad = sphere_config(1.0, Mode::inverse_k_power);
    bad.target = pde::expression_psi(psiexpr::Expression::parse("-1"), 2);
    CHECK_THROWS_AS(homotopy::psi_s(bad, sphere, 2, 0.5, PsiPoint{0.6, {1.0, 1.0}, -1.0, -1}), DomainError);
}

TEST_CASE("barrier target is the umbilic value scaled by phi") {
    const auto c = sphere_config(1.0, Mode::inverse_k_power);
    for (double t : {0.2, 0.75, 1.3}) {
        const double kap = 1 / std::tan(t);
        CHECK(homotopy::barrier_target(c.phi, sphere, 2, 2, t) ==
              doctest::Approx(symfunc::binomial(2, 2) * std::exp(0.75 - t) * kap * kap).epsilon(1e-12));
    }
    CHECK(homotopy::barrier_target(c.phi, sphere, 3, 2, 0.75) == doctest::Approx(3.0 / std::pow(std::tan(0.75), 2)));
}

TEST_CASE("default phi satisfies the convexity condition on random subintervals") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.02, pi / 2 - 0.02);
    const auto base = basegrid::build_grid({BaseKind::sphere2, 8, 16});
    for (int rep = 0; rep < 40; ++rep) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 0.05) continue;
        const double lo = a / 2, hi = std::min(b + 0.05, pi / 2);
        const auto p = WarpProfile::sphere(1.0, lo, hi);
        HomotopyConfig c;
        c.k = 2;
        c.phi = homotopy::build_phi(a, b, lo, hi);
        c.target = homotopy::barrier_psi(c.phi, p, 2, 2);
        homotopy::HypothesisOptions opts;
        opts.convexity_orders = {2, 3, 4};
        opts.t_samples = 4;
        const auto rep_ = homotopy::check_hypotheses(c, p, base, opts);
        for (int k : {2, 3, 4}) {
            const auto* cond = rep_.find("phi_convexity_k" + std::to_string(k));
            REQUIRE(cond != nullptr);
            CHECK(cond->passed);
        }
        for (const char* name : {"phi_positive", "phi_above_one", "phi_below_one", "phi_decreasing"})
            CHECK(rep_.find(name)->passed);
    }
}

TEST_CASE("continuation with an s-independent target stays on the slice") {
    for (Mode mode : {Mode::linear, Mode::inverse_k_power}) {
        const auto c = sphere_config(1.0, mode);
        const auto r = homotopy::continue_path(c, slice_state(c, 8));
        REQUIRE(r.success);
        CHECK(r.last_good_s == 1.0);
        CHECK((r.z.values().array() - c.phi.t0).abs().maxCoeff() <= 1e-12);
        CHECK(r.failed_attempts == 0);
    }
}

TEST_CASE("continuation reaches a modulated target") {
    const auto c = sphere_config(1.0, Mode::inverse_k_power, "1 + 0.05*sin(x1)*cos(x2)");
    const auto state = slice_state(c, 8);
    const auto r = homotopy::continue_path(c, state);
    REQUIRE(r.success);
    CHECK(r.last_good_s == 1.0);
    CHECK(r.steps.front().s == 0.0);
    CHECK(r.steps.back().s == 1.0);
    for (std::size_t i = 1; i < r.steps.size(); ++i) {
        CHECK(r.steps[i].s > r.steps[i - 1].s);
        CHECK(r.steps[i].s - r.steps[i - 1].s <= c.max_step + 1e-15);
        CHECK(r.steps[i].final.gamma_k_ok);
    }
    auto final_state = state;
    final_state.z = r.z;
    final_state.psi = c.target;
    CHECK(pde::residual(final_state).values().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("continuation gives up on a target that breaks the barrier") {
    auto c = sphere_config(10.0, Mode::inverse_k_power);
    c.min_step = 0.02;
    const auto r = homotopy::continue_path(c, slice_state(c, 8));
    CHECK_FALSE(r.success);
    CHECK(r.last_good_s > 0.0);
    CHECK(r.last_good_s < 1.0);
    CHECK(r.failed_attempts > 0);
    CHECK_FALSE(r.message.empty());

    // a start outside the admissible cone cannot even solve the s = 0 problem
    auto off = slice_state(c, 8);
    off.z = off.mfld.sample([](const Coordinates& x) { return 0.75 + 0.6 * std::cos(4 * x[1]); });
    const auto r0 = homotopy::continue_path(sphere_config(1.0, Mode::inverse_k_power), off);
    CHECK_FALSE(r0.success);
    CHECK(std::isnan(r0.last_good_s));
}

TEST_CASE("hypothesis outcomes") {
    const auto base = basegrid::build_grid({BaseKind::sphere2, 8, 16});
    const auto good = homotopy::check_hypotheses(sphere_config(1.0, Mode::inverse_k_power), sphere, base);
    CHECK(good.passed);
    CHECK(good.first_failure() == nullptr);
    for (const char* name : {"barrier_a", "barrier_b", "monotone_c", "phi_convexity_k2"}) CHECK(good.find(name)->passed);
    REQUIRE(good.find("barrier_claim") != nullptr);
    CHECK(good.find("barrier_claim")->advisory);

    const auto big = homotopy::check_hypotheses(sphere_config(10.0, Mode::inverse_k_power), sphere, base);
    CHECK_FALSE(big.passed);
    CHECK(big.find("barrier_a")->passed);
    CHECK_FALSE(big.find("barrier_b")->passed);
    CHECK(big.find("barrier_b")->worst_t >= 1.2);
    CHECK(big.find("monotone_c")->passed);

    // constant psi over a euclidean ambient: h^k psi grows, so (c) fails
    const auto e = WarpProfile::euclidean(0.1, 5);
    const auto t2 = basegrid::build_grid({BaseKind::torus2, 8, 8});
    HomotopyConfig c;
    c.k = 2;
    c.phi = homotopy::build_phi(1.0, 3.0, e.t_min(), e.t_max());
    c.target = pde::expression_psi(psiexpr::Expression::parse("0.5"), 2);
    const auto flat = homotopy::check_hypotheses(c, e, t2);
    CHECK_FALSE(flat.passed);
    const auto* mono = flat.find("monotone_c");
    CHECK_FALSE(mono->passed);
    CHECK(mono->worst_t > 1.0);
    CHECK(mono->worst_t < 3.0);
    // -d/dt log(t^2 / 2) = -2/t is most negative at the first sample above t_minus
    CHECK(mono->margin == doctest::Approx(-2.0 / mono->worst_t).epsilon(1e-6));
    CHECK(mono->worst_t < 1.1);
    CHECK_FALSE(flat.find("barrier_a")->passed);
    CHECK_FALSE(flat.find("barrier_b")->passed);
    CHECK(flat.first_failure() != nullptr);
}

// In the frame (d_t, e_i/h) the Hessian of f(t) is diag(f'', f' h'/h).
TEST_CASE("ambient convexity of radial functions") {
    const auto base = basegrid::build_grid({BaseKind::sphere2, 8, 16});
    // cos t is a first eigenfunction: Hess f + f g vanishes identically
    const double v = homotopy::min_ambient_convexity([](double t, const Coordinates&) { return std::cos(t); }, sphere,
                                                     base, 0.7);
    CHECK(std::abs(v) <= 1e-6);
    const double t = 0.75;
    const double e = std::exp(-t);
    const double w = homotopy::min_ambient_convexity([](double s, const Coordinates&) { return std::exp(-s); }, sphere,
                                                     base, t);
    CHECK(w == doctest::Approx(std::min(2 * e, e - e / std::tan(t))).epsilon(1e-6));
}
