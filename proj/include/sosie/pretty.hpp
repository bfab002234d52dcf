#pragma once

#include <string>

#include "sosie/ast.hpp"

namespace sosie {

// Canonical source text. parse(pretty_print(u), u.path, u.kind) is
// structurally equal to u.
std::string pretty_print(const SourceUnit& unit);
std::string pretty_print(const Expr& expr);

}  // namespace sosie
