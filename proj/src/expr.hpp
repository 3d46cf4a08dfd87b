#pragma once

#include <memory>
#include <string>

#include "model.hpp"

namespace fracperron {

// Arithmetic over the node coordinates:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | primary
//   primary:= number | 'x' | 'y' | '(' expr ')' | name '(' expr {',' expr} ')'
//
// with functions min, max, abs, sqrt, pow, hypot, exp, log. Parse and
// evaluation errors carry the source position. d_{x0} is expressible as
// min(1, abs(x - x0)) in 1D and min(1, hypot(x - a, y - b)) in 2D.
class Expr {
public:
    virtual ~Expr() = default;
    virtual double eval(const Point& at, int dim) const = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr parse_expr(const std::string& text);

double expr_eval(const std::string& text, const Point& at, int dim);

// Evaluate over every node of a grid; throws on non-finite values.
Field eval_field(const Expr& expr, GridPtr grid, double far_value);

}  // namespace fracperron
