#pragma once

#include "pbh/expr/expression.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pbh {

/**
 * Parse an infix expression.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('-' | '+') unary | power
 *   power   := primary ('^' unary)?            right-associative
 *   primary := number | coordinate | parameter | 'pi'
 *            | func '(' expr ')' | 'abspow' '(' expr ',' expr ')' | '(' expr ')'
 *   func    := sqrt | exp | log | sin | cos | neg
 *
 * Coordinates are `<prefix>1 .. <prefix>dim`. Parameters are bare identifiers looked up in
 * `params`; their position there becomes the parameter index used at evaluation time.
 * The exponent of `abspow` must fold to a numeric constant.
 *
 * Throws ParseError (with column) on syntax errors, unknown identifiers, coordinate
 * indices outside 1..dim, and wrong function arity.
 */
Expression parse(std::string_view text, int dim, const std::vector<std::string>& params = {},
                 const std::string& coordinate_prefix = "x");

} // namespace pbh
