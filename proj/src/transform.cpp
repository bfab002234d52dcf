#include "sosie/transform.hpp"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"
#include "sosie/diag.hpp"

namespace sosie {

const char* op_kind_name(OpKind op) {
  switch (op) {
    case OpKind::Add: return "add";
    case OpKind::Delete: return "delete";
    case OpKind::Replace: return "replace";
  }
  return "?";
}

std::optional<OpKind> op_kind_from_name(const std::string& name) {
  if (name == "add") return OpKind::Add;
  if (name == "delete") return OpKind::Delete;
  if (name == "replace") return OpKind::Replace;
  return std::nullopt;
}

namespace {

// Collects variable occurrences (references and assignment targets) that are
// not bound by a declaration within the subtree.
struct FreeVarScan {
  std::vector<std::string> bound;  // declaration stack
  std::vector<std::string> free_order;
  std::unordered_set<std::string> free_seen;

  bool is_bound(const std::string& name) const {
    return std::find(bound.begin(), bound.end(), name) != bound.end();
  }

  void occurrence(const std::string& name) {
    if (is_bound(name)) return;
    if (free_seen.insert(name).second) free_order.push_back(name);
  }

  void scan_expr(const Expr& e) {
    if (e.kind == Expr::Kind::Var) occurrence(e.text);
    for (const auto& arg : e.args) scan_expr(arg);
  }

  void scan_block(const Statement& block) {
    size_t mark = bound.size();
    for (const auto& child : block.children) scan_stmt(child);
    bound.resize(mark);
  }

  void scan_stmt(const Statement& s) {
    if (s.expr) scan_expr(*s.expr);
    if (s.kind == StmtKind::Assign) occurrence(s.var_name);
    if (s.kind == StmtKind::VarDecl) {
      bound.push_back(s.var_name);  // binds the following statements
      return;
    }
    if (s.kind == StmtKind::Block) {
      scan_block(s);
      return;
    }
    for (const auto& child : s.children) scan_block(child);
  }
};

const SourceUnit* unit_of(const ProgramIndex& idx, const std::string& path) {
  auto it = idx.units.find(path);
  return it == idx.units.end() ? nullptr : it->second;
}

// Return type of the function enclosing the id; in a well-typed program this
// equals the type carried by any return statement inside it.
const std::optional<TypeExpr>& enclosing_return_type(const ProgramIndex& idx,
                                                     const StatementId& id) {
  return idx.functions.at(id.function)->return_type;
}

struct PairVerdict {
  bool ok = true;
  std::string reason;
};

PairVerdict illegal(std::string reason) { return {false, std::move(reason)}; }

// Rules shared by legal_transplants and apply_transformation. The point is
// assumed to already be a valid transplantation point.
PairVerdict pair_legal(const Program& program, const ProgramIndex& idx,
                       const ScopeTable& scope, const Statement& point, OpKind op,
                       const Statement& transplant, std::vector<FreeVar>* free_out) {
  if (op == OpKind::Delete) return illegal("delete takes no transplant");
  if (transplant.is_block()) return illegal("blocks cannot be transplants");
  const SourceUnit* tu = unit_of(idx, transplant.id.unit_path);
  if (!tu || tu->kind != UnitKind::Program) {
    return illegal("transplants must come from program units");
  }
  if (op == OpKind::Replace && transplant.id == point.id) {
    return illegal("a statement cannot be replaced by itself");
  }
  if (op == OpKind::Replace &&
      (point.kind == StmtKind::VarDecl || point.kind == StmtKind::Return ||
       point.kind == StmtKind::Throw) &&
      transplant.kind != point.kind) {
    return illegal(std::string(stmt_kind_name(point.kind)) +
                   " can only be replaced by a statement of the same kind");
  }
  if (transplant.kind == StmtKind::Return) {
    // covers both the same-return-type rule for replace and the placement
    // rule for add: the value type is the origin function's return type
    if (enclosing_return_type(idx, transplant.id) != enclosing_return_type(idx, point.id)) {
      return illegal("return type differs from the enclosing function");
    }
  }
  if ((transplant.kind == StmtKind::Break || transplant.kind == StmtKind::Continue) &&
      !inside_loop(program, point.id)) {
    return illegal("break/continue transplants need a loop around the point");
  }
  const std::vector<ScopeEntry>* at_point = scope.at(point.id);
  if (!at_point) return illegal("no scope information at the point");
  std::vector<FreeVar> free = free_variables(transplant, scope);
  for (const auto& fv : free) {
    bool found = false;
    for (const auto& entry : *at_point) {
      if (entry.type == fv.type) {
        found = true;
        break;
      }
    }
    if (!found) {
      return illegal("no in-scope binding of type " + fv.type.to_string() +
                     " for free variable '" + fv.name + "'");
    }
  }
  if (free_out) *free_out = std::move(free);
  return {};
}

const Statement* resolve_point(const ProgramIndex& idx, const StatementId& point) {
  const Statement* stmt = idx.find(point);
  if (!stmt) {
    throw NotATransplantationPoint("unknown statement: " + point.to_string());
  }
  const SourceUnit* unit = unit_of(idx, point.unit_path);
  if (!unit || unit->kind != UnitKind::Program) {
    throw NotATransplantationPoint("transplantation points must be in program units: " +
                                   point.to_string());
  }
  if (stmt->is_block()) {
    throw NotATransplantationPoint("blocks are not transplantation points: " +
                                   point.to_string());
  }
  return stmt;
}

std::vector<std::string> scope_names_of_type(const std::vector<ScopeEntry>& entries,
                                             const TypeExpr& type) {
  std::vector<std::string> names;
  for (const auto& entry : entries) {
    if (entry.type == type) names.push_back(entry.name);
  }
  return names;
}

// All names declared anywhere in the function (parameters and VarDecls).
std::unordered_set<std::string> function_declared_names(const FunctionDecl& fn) {
  std::unordered_set<std::string> names;
  for (const auto& p : fn.params) names.insert(p.name);
  for_each_statement(fn.body, [&](const Statement& s) {
    if (s.kind == StmtKind::VarDecl) names.insert(s.var_name);
  });
  return names;
}

// Applies the variable maps to a detached transplant copy. Occurrences of
// names declared within the subtree follow fresh_names; free occurrences
// follow renaming.
struct Renamer {
  const std::map<std::string, std::string>& renaming;
  const std::map<std::string, std::string>& fresh_names;
  std::vector<std::string> bound;

  std::string mapped(const std::string& name) const {
    if (std::find(bound.begin(), bound.end(), name) != bound.end()) {
      auto it = fresh_names.find(name);
      return it == fresh_names.end() ? name : it->second;
    }
    auto it = renaming.find(name);
    return it == renaming.end() ? name : it->second;
  }

  void rename_expr(Expr& e) const {
    if (e.kind == Expr::Kind::Var) e.text = mapped(e.text);
    for (auto& arg : e.args) rename_expr(arg);
  }

  void rename_block(Statement& block) {
    size_t mark = bound.size();
    for (auto& child : block.children) rename_stmt(child);
    bound.resize(mark);
  }

  void rename_stmt(Statement& s) {
    if (s.expr) rename_expr(*s.expr);
    if (s.kind == StmtKind::Assign) s.var_name = mapped(s.var_name);
    if (s.kind == StmtKind::VarDecl) {
      bound.push_back(s.var_name);
      auto it = fresh_names.find(s.var_name);
      if (it != fresh_names.end()) s.var_name = it->second;
      return;
    }
    if (s.kind == StmtKind::Block) {
      rename_block(s);
      return;
    }
    for (auto& child : s.children) rename_block(child);
  }
};

}  // namespace

std::vector<FreeVar> free_variables(const Statement& root, const ScopeTable& scope) {
  FreeVarScan scan;
  scan.scan_stmt(root);
  const std::vector<ScopeEntry>* at_origin = scope.at(root.id);
  std::vector<FreeVar> out;
  for (const auto& name : scan.free_order) {
    const TypeExpr* type = nullptr;
    if (at_origin) {
      for (const auto& entry : *at_origin) {
        if (entry.name == name) {
          type = &entry.type;
          break;
        }
      }
    }
    if (!type) {
      throw IllegalSpec("free variable '" + name + "' has no scope entry at " +
                        root.id.to_string());
    }
    out.push_back({name, *type});
  }
  std::sort(out.begin(), out.end(),
            [](const FreeVar& a, const FreeVar& b) { return a.name < b.name; });
  return out;
}

std::vector<std::string> declared_variables(const Statement& root) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for_each_statement(root, [&](const Statement& s) {
    if (s.kind == StmtKind::VarDecl && seen.insert(s.var_name).second) {
      names.push_back(s.var_name);
    }
  });
  return names;
}

bool inside_loop(const Program& program, const StatementId& id) {
  for (const auto& unit : program.units) {
    if (unit.path != id.unit_path) continue;
    for (const auto& fn : unit.functions) {
      if (fn.name != id.function) continue;
      const Statement* cur = &fn.body;
      bool in_loop = false;
      for (int32_t step : id.path) {
        if (step < 0 || static_cast<size_t>(step) >= cur->children.size()) return false;
        if (cur->kind == StmtKind::While) in_loop = true;
        cur = &cur->children[static_cast<size_t>(step)];
      }
      return in_loop;
    }
  }
  return false;
}

CandidateSet legal_transplants(const Program& program, const ProgramIndex& idx,
                               const ScopeTable& scope, const StatementId& point, OpKind op) {
  const Statement* point_stmt = resolve_point(idx, point);
  CandidateSet set;
  set.op = op;
  set.point = point;
  if (op == OpKind::Delete) return set;

  const std::vector<ScopeEntry>* at_point = scope.at(point);
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Program) continue;
    for (const auto& fn : unit.functions) {
      for_each_statement(fn.body, [&](const Statement& t) {
        if (t.is_block()) return;
        std::vector<FreeVar> free;
        PairVerdict verdict = pair_legal(program, idx, scope, *point_stmt, op, t, &free);
        if (!verdict.ok) return;
        Candidate c;
        c.transplant = t.id;
        c.transplant_kind = t.kind;
        for (const auto& fv : free) {
          c.renaming_options.emplace_back(fv, scope_names_of_type(*at_point, fv.type));
        }
        set.candidates.push_back(std::move(c));
      });
    }
  }
  return set;
}

RenamingDraw draw_renaming(const Program& program, const ProgramIndex& idx,
                           const Candidate& candidate, const StatementId& point, Rng& rng) {
  RenamingDraw draw;
  for (const auto& [fv, options] : candidate.renaming_options) {
    draw.renaming[fv.name] = options[rng.below(options.size())];
  }
  const Statement* transplant = idx.find(candidate.transplant);
  const FunctionDecl* target = idx.functions.at(point.function);
  std::unordered_set<std::string> used = function_declared_names(*target);
  for (const auto& [_, value] : draw.renaming) used.insert(value);
  for (const auto& name : declared_variables(*transplant)) {
    if (!used.count(name)) {
      used.insert(name);
      continue;  // no collision, keep the original name
    }
    for (int n = 1;; ++n) {
      std::string fresh = name + "_" + std::to_string(n);
      if (!used.count(fresh)) {
        draw.fresh_names[name] = fresh;
        used.insert(fresh);
        break;
      }
    }
  }
  (void)program;
  return draw;
}

Program apply_transformation(const Program& program, const ProgramIndex& idx,
                             const ScopeTable& scope, const TransformationSpec& spec) {
  const Statement* point_stmt;
  try {
    point_stmt = resolve_point(idx, spec.point);
  } catch (const NotATransplantationPoint& e) {
    throw IllegalSpec(e.what());
  }

  Statement renamed;  // prepared transplant for Add/Replace
  if (spec.op == OpKind::Delete) {
    if (spec.transplant) throw IllegalSpec("delete takes no transplant");
    if (!spec.renaming.empty()) throw IllegalSpec("delete takes no renaming");
  } else {
    if (!spec.transplant) throw IllegalSpec("add/replace need a transplant");
    const Statement* transplant = idx.find(*spec.transplant);
    if (!transplant) throw IllegalSpec("unknown transplant: " + spec.transplant->to_string());
    std::vector<FreeVar> free;
    PairVerdict verdict =
        pair_legal(program, idx, scope, *point_stmt, spec.op, *transplant, &free);
    if (!verdict.ok) throw IllegalSpec(verdict.reason);

    // the renaming must cover exactly the free variables, with in-scope
    // same-type targets
    const std::vector<ScopeEntry>* at_point = scope.at(spec.point);
    if (spec.renaming.size() != free.size()) {
      throw IllegalSpec("renaming must map every free variable of the transplant");
    }
    for (const auto& fv : free) {
      auto it = spec.renaming.find(fv.name);
      if (it == spec.renaming.end()) {
        throw IllegalSpec("renaming misses free variable '" + fv.name + "'");
      }
      bool ok = false;
      for (const auto& entry : *at_point) {
        if (entry.name == it->second && entry.type == fv.type) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        throw IllegalSpec("renaming target '" + it->second + "' is not an in-scope " +
                          fv.type.to_string());
      }
    }
    const FunctionDecl* target = idx.functions.at(spec.point.function);
    std::unordered_set<std::string> target_names = function_declared_names(*target);
    std::unordered_set<std::string> fresh_values;
    for (const auto& [from, to] : spec.fresh_names) {
      if (target_names.count(to)) {
        throw IllegalSpec("fresh name '" + to + "' collides in the target function");
      }
      if (!fresh_values.insert(to).second) {
        throw IllegalSpec("fresh name '" + to + "' used twice");
      }
      (void)from;
    }

    renamed = *transplant;  // deep copy out of the pristine program
    Renamer renamer{spec.renaming, spec.fresh_names, {}};
    renamer.rename_stmt(renamed);
  }

  Program variant = program;  // deep copy
  SourceUnit* unit = nullptr;
  for (auto& u : variant.units) {
    if (u.path == spec.point.unit_path) {
      unit = &u;
      break;
    }
  }
  FunctionDecl* fn = nullptr;
  for (auto& f : unit->functions) {
    if (f.name == spec.point.function) {
      fn = &f;
      break;
    }
  }
  Statement* parent = &fn->body;
  for (size_t i = 0; i + 1 < spec.point.path.size(); ++i) {
    parent = &parent->children[static_cast<size_t>(spec.point.path[i])];
  }
  size_t slot = static_cast<size_t>(spec.point.path.back());

  switch (spec.op) {
    case OpKind::Delete:
      parent->children.erase(parent->children.begin() + static_cast<ptrdiff_t>(slot));
      break;
    case OpKind::Replace:
      parent->children[slot] = std::move(renamed);
      break;
    case OpKind::Add:
      parent->children.insert(parent->children.begin() + static_cast<ptrdiff_t>(slot) + 1,
                              std::move(renamed));
      break;
  }
  assign_ids(*unit);
  return variant;
}

std::string spec_to_json(const TransformationSpec& spec) {
  nlohmann::ordered_json j;
  j["op"] = op_kind_name(spec.op);
  j["point"] = spec.point.to_string();
  j["transplant"] = spec.transplant ? nlohmann::ordered_json(spec.transplant->to_string())
                                    : nlohmann::ordered_json(nullptr);
  j["renaming"] = spec.renaming;
  j["fresh"] = spec.fresh_names;
  return j.dump();
}

}  // namespace sosie
