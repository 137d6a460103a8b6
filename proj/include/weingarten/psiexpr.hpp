#pragma once

// Small arithmetic expression language for prescribed curvature functions
// psi(t, x1..xn, nu_t) and barrier functions phi(t).
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative, binds tighter than unary minus
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names: t, x1..x9, nu_t, pi, e. Functions: sin cos tan cot exp log sinh cosh
// tanh sqrt abs (one argument), pow (two arguments). So "-2^2" is -4.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace weingarten::psiexpr {

inline constexpr int kMaxCoordinates = 9;

/// A free variable of an expression.
struct Variable {
    enum class Kind : std::uint8_t { t, x, nu_t };
    Kind kind = Kind::t;
    int index = 0;  ///< 1-based coordinate index for Kind::x

    static Variable time() { return {Kind::t, 0}; }
    static Variable normal() { return {Kind::nu_t, 0}; }
    static Variable coordinate(int i) { return {Kind::x, i}; }

    std::string name() const;
    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Values for the free variables; unset entries are unbound.
struct Bindings {
    std::optional<double> t;
    std::optional<double> nu_t;
    std::array<std::optional<double>, kMaxCoordinates> x{};

    Bindings& set(const Variable& v, double value);
    std::optional<double> get(const Variable& v) const;
};

/// Parsed, immutable expression. Copies share nothing and are cheap enough to
/// pass by value; evaluation is pure.
class Expression {
public:
    enum class Op : std::uint8_t {
        constant, variable, add, sub, mul, div, pow, neg,
        sin, cos, tan, cot, exp, log, sinh, cosh, tanh, sqrt, abs, pow_call,
    };

    struct Node {
        Op op = Op::constant;
        double value = 0.0;
        Variable var{};
        int lhs = -1;
        int rhs = -1;
        const char* constant_name = nullptr;  ///< "pi" or "e" for named constants
    };

    /// Throws ParseError with the character offset of the offending token.
    static Expression parse(const std::string& source);

    const std::string& source() const noexcept { return source_; }
    const std::vector<Variable>& free_variables() const noexcept { return free_vars_; }
    bool depends_on(const Variable& v) const;

    /// Throws DomainError for unbound variables and out-of-domain calls
    /// (log/sqrt of invalid arguments), NumericError for non-finite results.
    double eval(const Bindings& b) const;

    /// Fully parenthesised text that parses back to an equivalent tree.
    std::string to_string() const;

private:
    double eval_node(int index, const Bindings& b) const;
    std::string print_node(int index) const;

    std::string source_;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<Variable> free_vars_;

    friend class Parser;
};

using PsiSpec = Expression;

/// Convenience for single-variable expressions such as phi(t) or h(t).
double eval_at_t(const Expression& expr, double t);

/// Central difference with step 1e-6 (1 + |x|), Richardson-extrapolated once.
double richardson_derivative(const std::function<double(double)>& f, double x);

/// Partial derivative of `expr` in `var` at `b`; `var` must be bound in `b`.
double partial(const Expression& expr, const Variable& var, const Bindings& b);

}  // namespace weingarten::psiexpr
