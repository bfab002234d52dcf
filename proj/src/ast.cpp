#include "sosie/ast.hpp"

#include <algorithm>
#include <charconv>

namespace sosie {

std::string TypeExpr::to_string() const {
  switch (kind) {
    case Kind::Int: return "Int";
    case Kind::Bool: return "Bool";
    case Kind::Str: return "Str";
    case Kind::Array: return "Array<" + elem->to_string() + ">";
  }
  return "?";
}

bool operator==(const TypeExpr& a, const TypeExpr& b) {
  if (a.kind != b.kind) return false;
  if (a.kind != TypeExpr::Kind::Array) return true;
  return *a.elem == *b.elem;
}

const char* op_symbol(Expr::Op op) {
  switch (op) {
    case Expr::Op::Add: return "+";
    case Expr::Op::Sub: return "-";
    case Expr::Op::Mul: return "*";
    case Expr::Op::Div: return "/";
    case Expr::Op::Mod: return "%";
    case Expr::Op::Lt: return "<";
    case Expr::Op::Le: return "<=";
    case Expr::Op::Gt: return ">";
    case Expr::Op::Ge: return ">=";
    case Expr::Op::Eq: return "==";
    case Expr::Op::Ne: return "!=";
    case Expr::Op::And: return "&&";
    case Expr::Op::Or: return "||";
    case Expr::Op::Neg: return "-";
    case Expr::Op::Not: return "!";
    case Expr::Op::None: return "?";
  }
  return "?";
}

const char* stmt_kind_name(StmtKind k) {
  switch (k) {
    case StmtKind::VarDecl: return "VarDecl";
    case StmtKind::Assign: return "Assign";
    case StmtKind::ExprStmt: return "ExprStmt";
    case StmtKind::If: return "If";
    case StmtKind::While: return "While";
    case StmtKind::Return: return "Return";
    case StmtKind::Break: return "Break";
    case StmtKind::Continue: return "Continue";
    case StmtKind::Throw: return "Throw";
    case StmtKind::Try: return "Try";
    case StmtKind::Block: return "Block";
    case StmtKind::Assert: return "Assert";
  }
  return "?";
}

std::optional<StmtKind> stmt_kind_from_name(const std::string& name) {
  static const std::pair<const char*, StmtKind> table[] = {
      {"VarDecl", StmtKind::VarDecl},   {"Assign", StmtKind::Assign},
      {"ExprStmt", StmtKind::ExprStmt}, {"If", StmtKind::If},
      {"While", StmtKind::While},       {"Return", StmtKind::Return},
      {"Break", StmtKind::Break},       {"Continue", StmtKind::Continue},
      {"Throw", StmtKind::Throw},       {"Try", StmtKind::Try},
      {"Block", StmtKind::Block},       {"Assert", StmtKind::Assert},
  };
  for (const auto& [n, k] : table) {
    if (name == n) return k;
  }
  return std::nullopt;
}

std::string StatementId::to_string() const {
  std::string out = unit_path;
  out += "::";
  out += function;
  out += "::";
  for (size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

std::optional<StatementId> StatementId::parse(const std::string& text) {
  // unit paths never contain "::", so split on the last two separators
  size_t p2 = text.rfind("::");
  if (p2 == std::string::npos || p2 == 0) return std::nullopt;
  size_t p1 = text.rfind("::", p2 - 1);
  if (p1 == std::string::npos) return std::nullopt;
  StatementId id;
  id.unit_path = text.substr(0, p1);
  id.function = text.substr(p1 + 2, p2 - p1 - 2);
  std::string tail = text.substr(p2 + 2);
  if (id.unit_path.empty() || id.function.empty()) return std::nullopt;
  size_t start = 0;
  while (start < tail.size()) {
    size_t dot = tail.find('.', start);
    std::string part = tail.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    int32_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 0) return std::nullopt;
    id.path.push_back(v);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return id;
}

bool StatementId::operator<(const StatementId& o) const {
  if (unit_path != o.unit_path) return unit_path < o.unit_path;
  if (function != o.function) return function < o.function;
  return path < o.path;
}

void Program::sort_units() {
  std::sort(units.begin(), units.end(),
            [](const SourceUnit& a, const SourceUnit& b) { return a.path < b.path; });
}

namespace {

void assign_ids_rec(Statement& s, const StatementId& id) {
  s.id = id;
  for (size_t i = 0; i < s.children.size(); ++i) {
    StatementId child = id;
    child.path.push_back(static_cast<int32_t>(i));
    assign_ids_rec(s.children[i], child);
  }
}

}  // namespace

void assign_ids(SourceUnit& unit) {
  for (auto& fn : unit.functions) {
    StatementId root;
    root.unit_path = unit.path;
    root.function = fn.name;
    assign_ids_rec(fn.body, root);
  }
}

void for_each_statement(const Statement& root,
                        const std::function<void(const Statement&)>& fn) {
  fn(root);
  for (const auto& c : root.children) for_each_statement(c, fn);
}

void for_each_statement(Statement& root, const std::function<void(Statement&)>& fn) {
  fn(root);
  for (auto& c : root.children) for_each_statement(c, fn);
}

int64_t count_statements(const Statement& root) {
  int64_t n = root.is_block() ? 0 : 1;
  for (const auto& c : root.children) n += count_statements(c);
  return n;
}

int64_t count_statements(const FunctionDecl& fn) { return count_statements(fn.body); }

int64_t count_program_statements(const Program& program) {
  int64_t n = 0;
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Program) continue;
    for (const auto& fn : unit.functions) n += count_statements(fn);
  }
  return n;
}

ProgramIndex ProgramIndex::build(const Program& program) {
  ProgramIndex idx;
  for (const auto& unit : program.units) {
    idx.units.emplace(unit.path, &unit);
    for (const auto& fn : unit.functions) {
      if (unit.kind == UnitKind::Program) idx.functions.emplace(fn.name, &fn);
      for_each_statement(fn.body, [&](const Statement& s) {
        idx.statements.emplace(s.id.to_string(), &s);
      });
    }
  }
  return idx;
}

const Statement* ProgramIndex::find(const StatementId& id) const {
  auto it = statements.find(id.to_string());
  return it == statements.end() ? nullptr : it->second;
}

const FunctionDecl* ProgramIndex::find_function(const std::string& name) const {
  auto it = functions.find(name);
  return it == functions.end() ? nullptr : it->second;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.op != b.op) return false;
  if (a.int_val != b.int_val || a.bool_val != b.bool_val || a.text != b.text) return false;
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool structurally_equal(const Statement& a, const Statement& b) {
  if (a.id != b.id || a.kind != b.kind || a.var_name != b.var_name) return false;
  if (a.var_type.has_value() != b.var_type.has_value()) return false;
  if (a.var_type && *a.var_type != *b.var_type) return false;
  if (a.expr.has_value() != b.expr.has_value()) return false;
  if (a.expr && !structurally_equal(*a.expr, *b.expr)) return false;
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool structurally_equal(const FunctionDecl& a, const FunctionDecl& b) {
  if (a.name != b.name || a.is_test != b.is_test) return false;
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
      return false;
  }
  if (a.return_type.has_value() != b.return_type.has_value()) return false;
  if (a.return_type && *a.return_type != *b.return_type) return false;
  return structurally_equal(a.body, b.body);
}

bool structurally_equal(const SourceUnit& a, const SourceUnit& b) {
  if (a.path != b.path || a.kind != b.kind) return false;
  if (a.functions.size() != b.functions.size()) return false;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    if (!structurally_equal(a.functions[i], b.functions[i])) return false;
  }
  return true;
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.units.size() != b.units.size()) return false;
  for (size_t i = 0; i < a.units.size(); ++i) {
    if (!structurally_equal(a.units[i], b.units[i])) return false;
  }
  return true;
}

}  // namespace sosie
