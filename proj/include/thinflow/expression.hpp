#pragma once

#include <string>

#include "thinflow/smooth_function.hpp"

namespace thinflow {

// Grammar over the single variable x:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' unary)?            right associative
//   atom   := number | 'x' | 'pi' | name '(' args ')' | '(' expr ')'
// Functions: sin cos exp log sqrt smoothstep(e0, e1, arg).
SmoothFunction1D parse_expression(const std::string& text);

}  // namespace thinflow
