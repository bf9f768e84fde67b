#ifndef VFE_PARSER_HPP
#define VFE_PARSER_HPP

#include <string_view>

#include "vfe/chart.hpp"
#include "vfe/expr.hpp"

namespace vfe {

/// Parse infix expression text over the chart's coordinate names.
///
/// Grammar: `+ - * / ^` with usual precedence, `^` takes an integer literal
/// exponent only; functions `sqrt ln sin cos atan`; coordinates named by the
/// chart convention (`x1..xm`, `y1..yN`, `vA_alpha`, `pA_alpha`, `p`).
/// Throws ParseError with 1-based line/column on bad input.
Expr parse_expr(const Chart& chart, std::string_view text);

}  // namespace vfe

#endif
