#ifndef HYPERTRI_EXPRESSION_HPP
#define HYPERTRI_EXPRESSION_HPP

#include "hypertri/symbol.hpp"

#include <functional>
#include <string_view>

namespace hypertri::expr {

/// Parses a symbol expression.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | 'i' | 't' | 'x' | 'xi'
///            | ('sin' | 'cos' | 'exp') '(' expr ')' | 'bracket' '(' 'xi' ')' | '(' expr ')'
///
/// Exponents must be real constants. sin, cos and exp reject arguments that
/// read xi. Subexpressions free of t, x and xi are folded, and a folded zero
/// becomes the zero symbol of order -infinity. Throws ParseError with the
/// offending column.
ScalarSymbol parse_symbol(std::string_view text);

/// Parses a data expression in (t, x); throws ParseError when it reads xi.
std::function<Complex(double t, double x)> parse_data(std::string_view text);

} // namespace hypertri::expr

#endif
