#pragma once

#include <string_view>

#include "epgm/grala/ast.hpp"

namespace epgm::grala {

/// Statements are `name = expr` or `expr`, optionally ended by `;`.
/// Precedence from loosest: `||`, `&&`, comparison, `+ -`, `* / %`, unary,
/// postfix (`.name`, `.name(args)`, `[index]`). A `<` in operand position
/// opens a collection literal whose elements admit no relational operators
/// at their top level. Throws ParseError.
Script parse(std::string_view source);
Script parse(const std::vector<Token>& tokens);

}  // namespace epgm::grala
