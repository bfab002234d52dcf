#include "sosie/program_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sosie/diag.hpp"
#include "sosie/parser.hpp"
#include "sosie/pretty.hpp"

namespace fs = std::filesystem;

namespace sosie {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> list_mini_files(const fs::path& dir) {
  std::vector<std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mini") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

Program load_program(const std::string& dir) {
  fs::path root(dir);
  if (!fs::exists(root)) throw IoError("program directory not found: " + dir);
  Program program;
  auto load = [&](const fs::path& sub, UnitKind kind) {
    for (const auto& file : list_mini_files(root / sub)) {
      // unit paths are relative to the program directory
      std::string rel = (sub / fs::path(file).filename()).generic_string();
      program.units.push_back(parse(read_file(file), rel, kind));
    }
  };
  load("src", UnitKind::Program);
  load("tests", UnitKind::Test);
  if (program.units.empty()) throw IoError("no .mini files under " + dir + "/src or /tests");
  bool has_program = false;
  for (const auto& u : program.units) has_program |= u.kind == UnitKind::Program;
  if (!has_program) throw IoError("no program units under " + dir + "/src");
  program.sort_units();
  return program;
}

std::string program_hash(const Program& program) {
  // FNV-1a over the canonical text of every unit
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& unit : program.units) {
    mix(unit.path);
    mix("\x1f");
    mix(pretty_print(unit));
    mix("\x1e");
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace sosie
