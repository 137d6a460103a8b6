#include "weingarten/psiexpr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "weingarten/errors.hpp"

namespace weingarten::psiexpr {

std::string Variable::name() const {
    switch (kind) {
        case Kind::t: return "t";
        case Kind::nu_t: return "nu_t";
        case Kind::x: return "x" + std::to_string(index);
    }
    return "?";
}

Bindings& Bindings::set(const Variable& v, double value) {
    switch (v.kind) {
        case Variable::Kind::t: t = value; break;
        case Variable::Kind::nu_t: nu_t = value; break;
        case Variable::Kind::x:
            if (v.index < 1 || v.index > kMaxCoordinates) throw DomainError("coordinate index out of range");
            x[static_cast<std::size_t>(v.index - 1)] = value;
            break;
    }
    return *this;
}

std::optional<double> Bindings::get(const Variable& v) const {
    switch (v.kind) {
        case Variable::Kind::t: return t;
        case Variable::Kind::nu_t: return nu_t;
        case Variable::Kind::x:
            if (v.index < 1 || v.index > kMaxCoordinates) return std::nullopt;
            return x[static_cast<std::size_t>(v.index - 1)];
    }
    return std::nullopt;
}

namespace {

using Op = Expression::Op;

struct FunctionEntry {
    const char* name;
    Op op;
    int arity;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", Op::sin, 1},   {"cos", Op::cos, 1},     {"tan", Op::tan, 1},   {"cot", Op::cot, 1},
    {"exp", Op::exp, 1},   {"log", Op::log, 1},     {"sinh", Op::sinh, 1}, {"cosh", Op::cosh, 1},
    {"tanh", Op::tanh, 1}, {"sqrt", Op::sqrt, 1},   {"abs", Op::abs, 1},   {"pow", Op::pow_call, 2},
};

const FunctionEntry* find_function(const std::string& name) {
    for (const auto& f : kFunctions)
        if (name == f.name) return &f;
    return nullptr;
}

const char* function_name(Op op) {
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name;
    return "?";
}

}  // namespace

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    Expression run() {
        expr_.source_ = src_;
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        expr_.root_ = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        return std::move(expr_);
    }

private:
    int add(Expression::Node n) {
        expr_.nodes_.push_back(n);
        return static_cast<int>(expr_.nodes_.size()) - 1;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = add({Op::add, 0, {}, lhs, parse_term()});
            else if (accept('-')) lhs = add({Op::sub, 0, {}, lhs, parse_term()});
            else return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = add({Op::mul, 0, {}, lhs, parse_unary()});
            else if (accept('/')) lhs = add({Op::div, 0, {}, lhs, parse_unary()});
            else return lhs;
        }
    }

    int parse_unary() {
        if (accept('-')) return add({Op::neg, 0, {}, parse_unary(), -1});
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power() {
        const int base = parse_primary();
        if (accept('^')) return add({Op::pow, 0, {}, base, parse_unary()});
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        if (accept('(')) {
            const int inner = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t count = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc{} || res.ptr != src_.data() + pos_) throw ParseError("malformed number", start);
        return add({Op::constant, value, {}, -1, -1});
    }

    int parse_name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);

        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            const FunctionEntry* fn = find_function(name);
            if (!fn) throw ParseError("unknown function '" + name + "'", start);
            ++pos_;
            std::vector<int> args{parse_expr()};
            while (accept(',')) args.push_back(parse_expr());
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            if (static_cast<int>(args.size()) != fn->arity) {
                throw ParseError("function '" + name + "' expects " + std::to_string(fn->arity) + " argument(s), got " +
                                     std::to_string(args.size()),
                                 start);
            }
            return add({fn->op, 0, {}, args[0], fn->arity == 2 ? args[1] : -1});
        }
        if (find_function(name)) throw ParseError("function '" + name + "' requires arguments", start);
        if (name == "pi") return add({Op::constant, std::numbers::pi, {}, -1, -1, "pi"});
        if (name == "e") return add({Op::constant, std::numbers::e, {}, -1, -1, "e"});

        Variable var;
        if (name == "t") {
            var = Variable::time();
        } else if (name == "nu_t") {
            var = Variable::normal();
        } else if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9') {
            var = Variable::coordinate(name[1] - '0');
        } else {
            throw ParseError("unknown identifier '" + name + "'", start);
        }
        if (std::find(expr_.free_vars_.begin(), expr_.free_vars_.end(), var) == expr_.free_vars_.end())
            expr_.free_vars_.push_back(var);
        return add({Op::variable, 0, var, -1, -1});
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    Expression expr_;
};

Expression Expression::parse(const std::string& source) { return Parser(source).run(); }

bool Expression::depends_on(const Variable& v) const {
    return std::find(free_vars_.begin(), free_vars_.end(), v) != free_vars_.end();
}

double Expression::eval(const Bindings& b) const {
    const double v = eval_node(root_, b);
    if (!std::isfinite(v)) throw NumericError("expression '" + source_ + "' evaluated to a non-finite value");
    return v;
}

double Expression::eval_node(int index, const Bindings& b) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::variable: {
            const auto v = b.get(n.var);
            if (!v) throw DomainError("unbound variable '" + n.var.name() + "'");
            return *v;
        }
        case Op::add: return eval_node(n.lhs, b) + eval_node(n.rhs, b);
        case Op::sub: return eval_node(n.lhs, b) - eval_node(n.rhs, b);
        case Op::mul: return eval_node(n.lhs, b) * eval_node(n.rhs, b);
        case Op::div: return eval_node(n.lhs, b) / eval_node(n.rhs, b);
        case Op::pow:
        case Op::pow_call: return std::pow(eval_node(n.lhs, b), eval_node(n.rhs, b));
        case Op::neg: return -eval_node(n.lhs, b);
        case Op::sin: return std::sin(eval_node(n.lhs, b));
        case Op::cos: return std::cos(eval_node(n.lhs, b));
        case Op::tan: return std::tan(eval_node(n.lhs, b));
        case Op::cot: return 1.0 / std::tan(eval_node(n.lhs, b));
        case Op::exp: return std::exp(eval_node(n.lhs, b));
        case Op::log: {
            const double a = eval_node(n.lhs, b);
            if (!(a > 0.0)) throw DomainError("log of non-positive value in '" + source_ + "'");
            return std::log(a);
        }
        case Op::sinh: return std::sinh(eval_node(n.lhs, b));
        case Op::cosh: return std::cosh(eval_node(n.lhs, b));
        case Op::tanh: return std::tanh(eval_node(n.lhs, b));
        case Op::sqrt: {
            const double a = eval_node(n.lhs, b);
            if (a < 0.0) throw DomainError("sqrt of negative value in '" + source_ + "'");
            return std::sqrt(a);
        }
        case Op::abs: return std::abs(eval_node(n.lhs, b));
    }
    return 0.0;
}

std::string Expression::to_string() const { return print_node(root_); }

std::string Expression::print_node(int index) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    auto binary = [&](const char* op) { return "(" + print_node(n.lhs) + op + print_node(n.rhs) + ")"; };
    switch (n.op) {
        case Op::constant: {
            if (n.constant_name) return n.constant_name;
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
        }
        case Op::variable: return n.var.name();
        case Op::add: return binary("+");
        case Op::sub: return binary("-");
        case Op::mul: return binary("*");
        case Op::div: return binary("/");
        case Op::pow: return binary("^");
        case Op::neg: return "(-" + print_node(n.lhs) + ")";
        case Op::pow_call: return "pow(" + print_node(n.lhs) + "," + print_node(n.rhs) + ")";
        default: return std::string(function_name(n.op)) + "(" + print_node(n.lhs) + ")";
    }
}

double eval_at_t(const Expression& expr, double t) {
    Bindings b;
    b.t = t;
    return expr.eval(b);
}

double richardson_derivative(const std::function<double(double)>& f, double x) {
    const double h = 1e-6 * (1.0 + std::abs(x));
    auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
    const double coarse = central(h);
    const double fine = central(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

double partial(const Expression& expr, const Variable& var, const Bindings& b) {
    const auto at = b.get(var);
    if (!at) throw DomainError("partial: variable '" + var.name() + "' is not bound");
    if (!expr.depends_on(var)) return 0.0;
    return richardson_derivative(
        [&](double value) {
            Bindings shifted = b;
            shifted.set(var, value);
            return expr.eval(shifted);
        },
        *at);
}

}  // namespace weingarten::psiexpr
