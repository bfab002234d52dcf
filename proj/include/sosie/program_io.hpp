#pragma once

#include <string>

#include "sosie/ast.hpp"

namespace sosie {

// Loads a program directory: src/*.mini are program units, tests/*.mini are
// test units. Units are sorted by path. Throws IoError or SyntaxError.
Program load_program(const std::string& dir);

// Content hash of the whole program (pretty-printed units in path order),
// used to bind signatures.json and campaign.json to one program version.
std::string program_hash(const Program& program);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sosie
