#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lyapnet {

// AST for the vector-field DSL. Nodes are immutable after parsing; whole
// trees are shared between VectorField copies.
enum class ExprKind { constant, variable, neg, add, sub, mul, div, pow, call };

enum class CallFn { sin, cos, exp, ln, abs };

struct Expr {
    ExprKind kind;
    double value = 0.0;  // constant
    int var_index = 0;   // variable, 0-based
    CallFn fn = CallFn::sin;
    std::shared_ptr<const Expr> lhs;  // unary operand for neg/call
    std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

// Parses one expression over variables x1..xn.
// Grammar: ^ binds tighter than unary minus, then *,/ and +,-; binaries are
// left-associative, ^ is right-associative. Functions: sin cos exp ln abs.
// Throws ErrorCode::parse / unknown_variable with line and column info.
ExprPtr parse_expression(const std::string& source, int n);

// Parses n expressions separated by ';' or newlines. Throws
// ErrorCode::arity when the component count differs from n.
std::vector<ExprPtr> parse_components(const std::string& source, int n);

// Evaluates without finiteness checks; callers validate results.
double eval_expr(const Expr& e, std::span<const double> x);

// Minimal-parentheses form that reparses to a structurally identical tree.
std::string pretty_print(const Expr& e);

}  // namespace lyapnet
