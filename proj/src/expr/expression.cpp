#include "pbh/expr/expression.hpp"

#include "pbh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

namespace pbh {
namespace {

bool is_binary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
}

double checked(double v) {
    if (!std::isfinite(v)) throw DomainError("expression evaluated to a non-finite value");
    return v;
}

double do_sqrt(double a) {
    if (a < 0.0) throw DomainError("sqrt of a negative number");
    return std::sqrt(a);
}
Jet do_sqrt(const Jet& a) { return sqrt(a); }

double do_log(double a) {
    if (a <= 0.0) throw DomainError("log of a non-positive number");
    return std::log(a);
}
Jet do_log(const Jet& a) { return log(a); }

double do_exp(double a) { return std::exp(a); }
Jet do_exp(const Jet& a) { return exp(a); }
double do_sin(double a) { return std::sin(a); }
Jet do_sin(const Jet& a) { return sin(a); }
double do_cos(double a) { return std::cos(a); }
Jet do_cos(const Jet& a) { return cos(a); }

double do_div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}
Jet do_div(const Jet& a, const Jet& b) { return a / b; }

double do_pow(double a, double q) {
    if (a < 0.0 && std::floor(q) != q) throw DomainError("negative base raised to a non-integer power");
    if (a == 0.0 && q < 0.0) throw DomainError("zero raised to a negative power");
    return std::pow(a, q);
}
Jet do_pow(const Jet& a, double q) { return pow(a, q); }

double do_pow_general(double a, double b) {
    if (a <= 0.0) throw DomainError("variable exponent requires a positive base");
    return std::pow(a, b);
}
Jet do_pow_general(const Jet& a, const Jet& b) {
    if (a.value() <= 0.0) throw DomainError("variable exponent requires a positive base");
    return pow(a, b);
}

template <class T>
T apply(Op op, const T& a, const T& b, double value, bool exponent_constant) {
    switch (op) {
    case Op::Neg: return -a;
    case Op::Sqrt: return do_sqrt(a);
    case Op::Exp: return do_exp(a);
    case Op::Log: return do_log(a);
    case Op::Sin: return do_sin(a);
    case Op::Cos: return do_cos(a);
    case Op::AbsPow: return abs_pow(a, value);
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return do_div(a, b);
    case Op::Pow:
        if (exponent_constant) return do_pow(a, value_of(b));
        return do_pow_general(a, b);
    default: break;
    }
    throw ConfigError("internal: leaf op passed to apply");
}

template <class T>
T leaf_value(const Node& n, std::span<const T> coords, std::span<const double> params) {
    switch (n.op) {
    case Op::Constant: return T(n.value);
    case Op::Coordinate:
        if (n.index >= static_cast<int>(coords.size()))
            throw ConfigError("coordinate x" + std::to_string(n.index + 1) + " not supplied");
        return coords[static_cast<std::size_t>(n.index)];
    case Op::Parameter:
        if (n.index >= static_cast<int>(params.size()))
            throw ConfigError("parameter '" + n.name + "' has no bound value");
        return T(params[static_cast<std::size_t>(n.index)]);
    default: break;
    }
    throw ConfigError("internal: non-leaf op passed to leaf_value");
}

template <class T>
T eval_node(const Node& n, std::span<const T> coords, std::span<const double> params) {
    switch (n.op) {
    case Op::Constant:
    case Op::Coordinate:
    case Op::Parameter: return leaf_value<T>(n, coords, params);
    default: break;
    }
    const T a = eval_node<T>(*n.lhs, coords, params);
    if (!is_binary(n.op)) return apply<T>(n.op, a, a, n.value, false);
    const T b = eval_node<T>(*n.rhs, coords, params);
    return apply<T>(n.op, a, b, n.value, !n.rhs->depends_on_coordinates);
}

std::string format_number(double v) {
    std::string s = fmt::format("{}", v);
    if (v < 0.0 || s.find_first_of("eE") != std::string::npos) return "(" + s + ")";
    return s;
}

const char* function_name(Op op) {
    switch (op) {
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    default: return nullptr;
    }
}

const char* operator_symbol(Op op) {
    switch (op) {
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    case Op::Div: return " / ";
    case Op::Pow: return " ^ ";
    default: return nullptr;
    }
}

void render(const Node& n, const std::string& prefix, std::string& out) {
    switch (n.op) {
    case Op::Constant: out += format_number(n.value); return;
    case Op::Coordinate: out += prefix + std::to_string(n.index + 1); return;
    case Op::Parameter: out += n.name; return;
    case Op::Neg:
        out += "(-";
        render(*n.lhs, prefix, out);
        out += ")";
        return;
    case Op::AbsPow:
        out += "abspow(";
        render(*n.lhs, prefix, out);
        out += ", " + fmt::format("{}", n.value) + ")";
        return;
    default: break;
    }
    if (const char* fn = function_name(n.op)) {
        out += fn;
        out += "(";
        render(*n.lhs, prefix, out);
        out += ")";
        return;
    }
    out += "(";
    render(*n.lhs, prefix, out);
    out += operator_symbol(n.op);
    render(*n.rhs, prefix, out);
    out += ")";
}

} // namespace

Expression Expression::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Op::Constant;
    n->value = value;
    return Expression(std::move(n));
}

Expression Expression::coordinate(int index) {
    if (index < 0) throw ConfigError("negative coordinate index");
    auto n = std::make_shared<Node>();
    n->op = Op::Coordinate;
    n->index = index;
    n->depends_on_coordinates = true;
    n->max_coordinate = index;
    return Expression(std::move(n));
}

Expression Expression::parameter(int index, std::string name) {
    if (index < 0) throw ConfigError("negative parameter index");
    auto n = std::make_shared<Node>();
    n->op = Op::Parameter;
    n->index = index;
    n->name = std::move(name);
    n->max_parameter = index;
    return Expression(std::move(n));
}

Expression Expression::make(Op op, NodePtr lhs, NodePtr rhs, double value) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->depends_on_coordinates = lhs->depends_on_coordinates || (rhs && rhs->depends_on_coordinates);
    n->max_coordinate = std::max(lhs->max_coordinate, rhs ? rhs->max_coordinate : -1);
    n->max_parameter = std::max(lhs->max_parameter, rhs ? rhs->max_parameter : -1);
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    // Fold purely numeric subtrees when the result is a valid finite number.
    const bool numeric = n->lhs->op == Op::Constant && (!n->rhs || n->rhs->op == Op::Constant);
    if (numeric) {
        try {
            const double a = n->lhs->value;
            const double b = n->rhs ? n->rhs->value : a;
            const double folded = apply<double>(op, a, b, value, true);
            if (std::isfinite(folded)) return constant(folded);
        } catch (const DomainError&) {
            // leave unfolded; evaluation reports the domain error
        }
    }
    return Expression(std::move(n));
}

Expression operator+(const Expression& a, const Expression& b) {
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return Expression::make(Op::Add, a.root_, b.root_);
}

Expression operator-(const Expression& a, const Expression& b) {
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return Expression::make(Op::Sub, a.root_, b.root_);
}

Expression operator*(const Expression& a, const Expression& b) {
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return Expression::make(Op::Mul, a.root_, b.root_);
}

Expression operator/(const Expression& a, const Expression& b) {
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expression::constant(0.0);
    return Expression::make(Op::Div, a.root_, b.root_);
}

Expression operator-(const Expression& a) {
    if (a.root_->op == Op::Neg) return Expression(a.root_->lhs);
    return Expression::make(Op::Neg, a.root_);
}

Expression pow(const Expression& base, const Expression& exponent) {
    if (exponent.is_constant(1.0)) return base;
    if (exponent.is_constant(0.0)) return Expression::constant(1.0);
    return Expression::make(Op::Pow, base.root_, exponent.root_);
}

Expression sqrt(const Expression& a) { return Expression::make(Op::Sqrt, a.root_); }
Expression exp(const Expression& a) { return Expression::make(Op::Exp, a.root_); }
Expression log(const Expression& a) { return Expression::make(Op::Log, a.root_); }
Expression sin(const Expression& a) { return Expression::make(Op::Sin, a.root_); }
Expression cos(const Expression& a) { return Expression::make(Op::Cos, a.root_); }
Expression abs_pow(const Expression& a, double q) { return Expression::make(Op::AbsPow, a.root_, nullptr, q); }

Expression Expression::derivative(int coord) const {
    std::unordered_map<const Node*, Expression> memo;
    auto rec = [&](auto&& self, const NodePtr& node) -> Expression {
        if (!node->depends_on_coordinates) return constant(0.0);
        if (auto it = memo.find(node.get()); it != memo.end()) return it->second;
        const Expression u(node->lhs);
        Expression result;
        switch (node->op) {
        case Op::Coordinate: result = constant(node->index == coord ? 1.0 : 0.0); break;
        case Op::Neg: result = -self(self, node->lhs); break;
        case Op::Sqrt: result = self(self, node->lhs) / (2.0 * Expression(node)); break;
        case Op::Exp: result = Expression(node) * self(self, node->lhs); break;
        case Op::Log: result = self(self, node->lhs) / u; break;
        case Op::Sin: result = cos(u) * self(self, node->lhs); break;
        case Op::Cos: result = -(sin(u) * self(self, node->lhs)); break;
        case Op::AbsPow:
            result = node->value * abs_pow(u, node->value - 2.0) * u * self(self, node->lhs);
            break;
        case Op::Add: result = self(self, node->lhs) + self(self, node->rhs); break;
        case Op::Sub: result = self(self, node->lhs) - self(self, node->rhs); break;
        case Op::Mul: {
            const Expression v(node->rhs);
            result = self(self, node->lhs) * v + u * self(self, node->rhs);
            break;
        }
        case Op::Div: {
            const Expression v(node->rhs);
            result = (self(self, node->lhs) * v - u * self(self, node->rhs)) / (v * v);
            break;
        }
        case Op::Pow: {
            const Expression v(node->rhs);
            if (!node->rhs->depends_on_coordinates) {
                result = v * pow(u, v - 1.0) * self(self, node->lhs);
            } else {
                result = Expression(node) * (self(self, node->rhs) * log(u) + v * self(self, node->lhs) / u);
            }
            break;
        }
        default: result = constant(0.0); break;
        }
        memo.emplace(node.get(), result);
        return result;
    };
    if (coord < 0) throw ConfigError("negative coordinate index");
    return rec(rec, root_);
}

Expression Expression::substitute(std::span<const Expression> replacements) const {
    std::unordered_map<const Node*, Expression> memo;
    auto rec = [&](auto&& self, const NodePtr& node) -> Expression {
        if (!node->depends_on_coordinates) return Expression(node);
        if (auto it = memo.find(node.get()); it != memo.end()) return it->second;
        Expression result;
        if (node->op == Op::Coordinate) {
            if (node->index >= static_cast<int>(replacements.size()))
                throw ConfigError("substitute: no replacement for coordinate " + std::to_string(node->index + 1));
            result = replacements[static_cast<std::size_t>(node->index)];
        } else {
            const Expression a = self(self, node->lhs);
            switch (node->op) {
            case Op::Neg: result = -a; break;
            case Op::Sqrt: result = sqrt(a); break;
            case Op::Exp: result = exp(a); break;
            case Op::Log: result = log(a); break;
            case Op::Sin: result = sin(a); break;
            case Op::Cos: result = cos(a); break;
            case Op::AbsPow: result = abs_pow(a, node->value); break;
            default: {
                const Expression b = self(self, node->rhs);
                switch (node->op) {
                case Op::Add: result = a + b; break;
                case Op::Sub: result = a - b; break;
                case Op::Mul: result = a * b; break;
                case Op::Div: result = a / b; break;
                case Op::Pow: result = pow(a, b); break;
                default: break;
                }
            }
            }
        }
        memo.emplace(node.get(), result);
        return result;
    };
    return rec(rec, root_);
}

std::string Expression::to_string(const std::string& coordinate_prefix) const {
    std::string out;
    render(*root_, coordinate_prefix, out);
    return out;
}

double Expression::evaluate(std::span<const double> coords, std::span<const double> params) const {
    return checked(eval_node<double>(*root_, coords, params));
}

Jet Expression::evaluate(std::span<const Jet> coords, std::span<const double> params) const {
    Jet v = eval_node<Jet>(*root_, coords, params);
    checked(v.value());
    return v;
}

Tape::Tape(std::span<const Expression> outputs) {
    using Key = std::tuple<int, std::uint64_t, int, int, int, std::string>;
    std::map<Key, int> interned;
    std::unordered_map<const Node*, int> seen;
    auto rec = [&](auto&& self, const Node& n) -> int {
        if (auto it = seen.find(&n); it != seen.end()) return it->second;
        const int lhs = n.lhs ? self(self, *n.lhs) : -1;
        const int rhs = n.rhs ? self(self, *n.rhs) : -1;
        const Key key{static_cast<int>(n.op), std::bit_cast<std::uint64_t>(n.value), n.index, lhs, rhs,
                      n.op == Op::Parameter ? n.name : std::string()};
        auto [it, inserted] = interned.emplace(key, static_cast<int>(code_.size()));
        if (inserted) {
            code_.push_back(Instruction{n.op, n.value, n.index, lhs, rhs, n.rhs && !n.rhs->depends_on_coordinates});
        }
        seen.emplace(&n, it->second);
        return it->second;
    };
    for (const auto& e : outputs) outputs_.push_back(rec(rec, e.node()));
}

template <class T>
void Tape::execute(std::span<const T> coords, std::span<const double> params, std::span<T> out) const {
    if (out.size() != outputs_.size()) throw ConfigError("tape: output span has the wrong size");
    std::vector<T> reg(code_.size());
    for (std::size_t k = 0; k < code_.size(); ++k) {
        const auto& ins = code_[k];
        switch (ins.op) {
        case Op::Constant: reg[k] = T(ins.value); break;
        case Op::Coordinate:
            if (ins.index >= static_cast<int>(coords.size()))
                throw ConfigError("coordinate x" + std::to_string(ins.index + 1) + " not supplied");
            reg[k] = coords[static_cast<std::size_t>(ins.index)];
            break;
        case Op::Parameter:
            if (ins.index >= static_cast<int>(params.size())) throw ConfigError("parameter has no bound value");
            reg[k] = T(params[static_cast<std::size_t>(ins.index)]);
            break;
        default: {
            const T& a = reg[static_cast<std::size_t>(ins.lhs)];
            const T& b = ins.rhs >= 0 ? reg[static_cast<std::size_t>(ins.rhs)] : a;
            reg[k] = apply<T>(ins.op, a, b, ins.value, ins.exponent_constant);
        }
        }
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
        out[i] = reg[static_cast<std::size_t>(outputs_[i])];
        checked(value_of(out[i]));
    }
}

void Tape::run(std::span<const double> coords, std::span<const double> params, std::span<double> out) const {
    execute<double>(coords, params, out);
}

void Tape::run(std::span<const Jet> coords, std::span<const double> params, std::span<Jet> out) const {
    execute<Jet>(coords, params, out);
}

} // namespace pbh
