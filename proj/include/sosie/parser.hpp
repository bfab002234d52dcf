#pragma once

#include <string>

#include "sosie/ast.hpp"

namespace sosie {

// Parses one MiniLang source unit. Statement ids are assigned depth-first.
// Throws SyntaxError on malformed input.
SourceUnit parse(const std::string& source_text, const std::string& path,
                 UnitKind kind = UnitKind::Program);

}  // namespace sosie
