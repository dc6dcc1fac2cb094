#pragma once

#include <functional>
#include <string>

namespace speclab {

// Parses a small arithmetic expression language used for initial data in
// config files:
//
//   expr := term (('+' | '-') term)*
//   term := factor (('*' | '/') factor)*
//   factor := unary ('^' factor)?            (right associative)
//   unary := ('+' | '-')* atom
//   atom := number | 'pi' | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
//   func := sin | cos | tan | tanh | exp | log | abs | sqrt
//
// Evaluation is over doubles; 'y' is only meaningful for 2-d fields.
// Throws std::invalid_argument on malformed input.
std::function<double(double, double)> parse_expression(const std::string& text);

// Convenience: parse then evaluate once.
double eval_expression(const std::string& text, double x, double y = 0.0);

}  // namespace speclab
