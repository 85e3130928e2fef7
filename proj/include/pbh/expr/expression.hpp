#pragma once

#include "pbh/expr/jet.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pbh {

enum class Op {
    Constant,
    Coordinate,
    Parameter,
    Neg,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    AbsPow, // |u|^q with q stored in `value`
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Constant;
    double value = 0.0; // Constant value, or the AbsPow exponent
    int index = 0;      // Coordinate or Parameter index
    std::string name;   // Parameter name
    NodePtr lhs;
    NodePtr rhs;
    bool depends_on_coordinates = false;
    int max_coordinate = -1;
    int max_parameter = -1;
};

/**
 * Immutable closed-form scalar expression over chart coordinates and named parameters.
 *
 * Trees are shared and never mutated, so copies are cheap and concurrent reads are safe.
 * Construction helpers fold constants (0 + e, 1 * e, numeric subtrees) and do nothing else.
 */
class Expression {
public:
    Expression() : Expression(constant(0.0)) {}

    static Expression constant(double value);
    static Expression coordinate(int index);
    static Expression parameter(int index, std::string name);

    const Node& node() const noexcept { return *root_; }
    const NodePtr& root() const noexcept { return root_; }

    bool is_constant() const noexcept { return root_->op == Op::Constant; }
    bool is_constant(double v) const noexcept { return is_constant() && root_->value == v; }
    bool depends_on_coordinates() const noexcept { return root_->depends_on_coordinates; }
    /// Largest coordinate index referenced, -1 if none.
    int max_coordinate() const noexcept { return root_->max_coordinate; }
    int max_parameter() const noexcept { return root_->max_parameter; }

    /// Exact symbolic partial derivative with respect to coordinate `coord`.
    Expression derivative(int coord) const;

    /// Replace every coordinate reference x_i by `replacements[i]`.
    Expression substitute(std::span<const Expression> replacements) const;

    /// Infix rendering that parses back to an identical-valued expression.
    /// Coordinates render as `<prefix><i+1>`, parameters by name.
    std::string to_string(const std::string& coordinate_prefix = "x") const;

    /// Plain-double evaluation; throws DomainError outside the domain or on a non-finite result.
    double evaluate(std::span<const double> coords, std::span<const double> params) const;
    Jet evaluate(std::span<const Jet> coords, std::span<const double> params) const;

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    friend Expression pow(const Expression& base, const Expression& exponent);
    friend Expression sqrt(const Expression& a);
    friend Expression exp(const Expression& a);
    friend Expression log(const Expression& a);
    friend Expression sin(const Expression& a);
    friend Expression cos(const Expression& a);
    friend Expression abs_pow(const Expression& a, double q);

private:
    explicit Expression(NodePtr root) : root_(std::move(root)) {}
    static Expression make(Op op, NodePtr lhs, NodePtr rhs = nullptr, double value = 0.0);

    NodePtr root_;
};

inline Expression operator+(const Expression& a, double b) { return a + Expression::constant(b); }
inline Expression operator+(double a, const Expression& b) { return Expression::constant(a) + b; }
inline Expression operator-(const Expression& a, double b) { return a - Expression::constant(b); }
inline Expression operator-(double a, const Expression& b) { return Expression::constant(a) - b; }
inline Expression operator*(const Expression& a, double b) { return a * Expression::constant(b); }
inline Expression operator*(double a, const Expression& b) { return Expression::constant(a) * b; }
inline Expression operator/(const Expression& a, double b) { return a / Expression::constant(b); }
inline Expression operator/(double a, const Expression& b) { return Expression::constant(a) / b; }
inline Expression pow(const Expression& a, double q) { return pow(a, Expression::constant(q)); }

/**
 * A batch of expressions flattened into one straight-line program.
 *
 * Structurally identical subtrees are evaluated once, which matters for metric
 * components and their derivatives where the same factors recur everywhere.
 */
class Tape {
public:
    Tape() = default;
    explicit Tape(std::span<const Expression> outputs);

    std::size_t output_count() const noexcept { return outputs_.size(); }
    std::size_t instruction_count() const noexcept { return code_.size(); }

    void run(std::span<const double> coords, std::span<const double> params, std::span<double> out) const;
    void run(std::span<const Jet> coords, std::span<const double> params, std::span<Jet> out) const;

private:
    struct Instruction {
        Op op;
        double value;
        int index;
        int lhs;
        int rhs;
        bool exponent_constant;
    };
    template <class T>
    void execute(std::span<const T> coords, std::span<const double> params, std::span<T> out) const;

    std::vector<Instruction> code_;
    std::vector<int> outputs_;
};

} // namespace pbh
