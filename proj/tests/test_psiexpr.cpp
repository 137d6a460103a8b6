#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "weingarten/errors.hpp"
#include "weingarten/psiexpr.hpp"

using namespace weingarten;
using psiexpr::Bindings;
using psiexpr::Expression;
using psiexpr::Variable;
constexpr double pi = std::numbers::pi;

namespace {

double at(const std::string& src, double t, double x1 = 0, double nu = -1) {
    Bindings b;
    b.t = t;
    b.x[0] = x1;
    b.nu_t = nu;
    return Expression::parse(src).eval(b);
}

}  // namespace

TEST_CASE("evaluation") {
    CHECK(at("2*t+1", 1) == 3.0);
    CHECK(at("sin(t)^2 + cos(t)^2", 0.37) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(at("cot(t)^2", pi / 4) == doctest::Approx(1.0));
    CHECK(at("exp(0.75 - t)", 0.75) == 1.0);
    CHECK(at("t^2/x1", 2, 4) == 1.0);
    CHECK(at("1+2*3^2", 0) == 19.0);
    CHECK(at("-2^2", 0) == -4.0);
    CHECK(at("2^3^2", 0) == 512.0);
    CHECK(at("pow(t, 3) - abs(-2) + sqrt(4) + log(e)", 2) == doctest::Approx(9.0));
    CHECK(at("tan(t) - sinh(t) + cosh(t) + tanh(t) - pi", 0.3) ==
          doctest::Approx(std::tan(0.3) - std::sinh(0.3) + std::cosh(0.3) + std::tanh(0.3) - pi));
    CHECK(at("1e-3 * 2.5E2 + .5", 0) == doctest::Approx(0.75));
    CHECK(at("nu_t * 2", 0, 0, -0.25) == -0.5);
}

TEST_CASE("syntax errors carry positions") {
    auto pos = [](const std::string& s) {
        try {
            Expression::parse(s);
        } catch (const ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1L;
    };
    CHECK(pos("2*") == 2);
    CHECK(pos("(1+2") == 4);
    CHECK(pos("1+)") == 2);
    CHECK(pos("foo(t)") == 0);
    CHECK(pos("sin(t, t)") >= 0);
    CHECK(pos("x0") == 0);
    CHECK(pos("t $ 2") == 2);
    CHECK(pos("3 4") == 2);
    CHECK(pos("2 * t") == -1);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(at("log(t)", -1), DomainError);
    CHECK_THROWS_AS(at("sqrt(t)", -1), DomainError);
    Bindings none;
    CHECK_THROWS_AS(Expression::parse("t + x2").eval(none), DomainError);
    CHECK_THROWS_AS(at("1/t", 0), NumericError);
}

TEST_CASE("free variables") {
    const auto e = Expression::parse("t*x2 + nu_t - x2 + pi");
    CHECK(e.depends_on(Variable::time()));
    CHECK(e.depends_on(Variable::coordinate(2)));
    CHECK_FALSE(e.depends_on(Variable::coordinate(1)));
    CHECK(e.depends_on(Variable::normal()));
    CHECK(e.free_variables().size() == 3);
    CHECK(Variable::coordinate(3).name() == "x3");
    CHECK(Variable::normal().name() == "nu_t");
}

TEST_CASE("print and reparse") {
    const char* sources[] = {"-2^2 + t", "1+2*3^2", "sin(x1)*cos(x2) - nu_t/3", "2^3^2 - (t - 1)^2",
                             "exp(0.75 - t) * (1 + 0.05*sin(x1)*cos(x2))", "pow(t, 1/3) + pi*e - -t",
                             "cot(t)^-2", "abs(nu_t) ^ 0.5 / tanh(t + 0.1)"};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.2, 1.4), v(-1, -0.05);
    for (const char* s : sources) {
        const auto a = Expression::parse(s);
        const auto b = Expression::parse(a.to_string());
        CHECK(b.to_string() == a.to_string());
        for (int i = 0; i < 100; ++i) {
            Bindings bind;
            bind.t = u(rng);
            bind.x[0] = u(rng);
            bind.x[1] = u(rng);
            bind.nu_t = v(rng);
            CHECK(std::abs(a.eval(bind) - b.eval(bind)) <= 1e-14);
        }
    }
}

TEST_CASE("partial derivatives") {
    Bindings b;
    b.t = 3;
    b.nu_t = -0.5;
    b.x[0] = 0.4;
    CHECK(psiexpr::partial(Expression::parse("t^2"), Variable::time(), b) == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(std::abs(psiexpr::partial(Expression::parse("x1 + 2"), Variable::time(), b)) <= 1e-9);
    CHECK(psiexpr::partial(Expression::parse("nu_t^2"), Variable::normal(), b) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(psiexpr::richardson_derivative([](double x) { return std::sin(x); }, 0.3) ==
          doctest::Approx(std::cos(0.3)).epsilon(1e-9));
}

TEST_CASE("partial derivatives over an expression library") {
    struct Case {
        const char* src;
        std::function<double(double)> d;  // d/dt at x1 = 0.4
    };
    const Case cases[] = {
        {"t", [](double) { return 1.0; }},
        {"t^3", [](double t) { return 3 * t * t; }},
        {"sin(t)", [](double t) { return std::cos(t); }},
        {"cos(2*t)", [](double t) { return -2 * std::sin(2 * t); }},
        {"tan(t)", [](double t) { return 1 / std::pow(std::cos(t), 2); }},
        {"cot(t)", [](double t) { return -1 / std::pow(std::sin(t), 2); }},
        {"exp(-t)", [](double t) { return -std::exp(-t); }},
        {"log(t)", [](double t) { return 1 / t; }},
        {"sinh(t)", [](double t) { return std::cosh(t); }},
        {"cosh(t)", [](double t) { return std::sinh(t); }},
        {"tanh(t)", [](double t) { return 1 / std::pow(std::cosh(t), 2); }},
        {"sqrt(t)", [](double t) { return 0.5 / std::sqrt(t); }},
        {"1/t", [](double t) { return -1 / (t * t); }},
        {"t*x1", [](double) { return 0.4; }},
        {"pow(t, 2.5)", [](double t) { return 2.5 * std::pow(t, 1.5); }},
        {"exp(0.75 - t)*cot(t)^2", [](double t) {
             const double c = 1 / std::tan(t);
             return std::exp(0.75 - t) * (-c * c - 2 * c / std::pow(std::sin(t), 2));
         }},
        {"sin(t)^2*x1", [](double t) { return 0.4 * std::sin(2 * t); }},
        {"t^t", [](double t) { return std::pow(t, t) * (std::log(t) + 1); }},
        {"abs(t - 5)", [](double) { return -1.0; }},
        {"sinh(t)^3", [](double t) { return 3 * std::pow(std::sinh(t), 2) * std::cosh(t); }},
    };
    for (const auto& c : cases)
        for (double t : {0.3, 0.7, 1.1}) {
            Bindings b;
            b.t = t;
            b.x[0] = 0.4;
            const double ref = c.d(t);
            CHECK(std::abs(psiexpr::partial(Expression::parse(c.src), Variable::time(), b) - ref) <=
                  1e-5 * std::max(1.0, std::abs(ref)));
        }
}
