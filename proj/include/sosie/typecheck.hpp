#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sosie/ast.hpp"

namespace sosie {

struct ScopeEntry {
  std::string name;
  TypeExpr type;
};

// Per-statement view of the bindings visible at that statement, in declaration
// order (parameters first). A VarDecl's own binding appears only at the
// statements that follow it.
class ScopeTable {
 public:
  const std::vector<ScopeEntry>* at(const StatementId& id) const {
    auto it = entries_.find(id.to_string());
    return it == entries_.end() ? nullptr : &it->second;
  }

  void put(const StatementId& id, std::vector<ScopeEntry> scope) {
    entries_[id.to_string()] = std::move(scope);
  }

  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<ScopeEntry>> entries_;
};

// Checks the whole program (all units) and returns the scope table.
// Throws TypeError on the first violation.
ScopeTable typecheck(const Program& program);

// Static type of an expression under the given scope; nullopt means Void.
// Call resolution uses the program-unit functions in `idx`.
// Throws TypeError if the expression is ill-typed.
std::optional<TypeExpr> infer_expr_type(const ProgramIndex& idx,
                                        const std::vector<ScopeEntry>& scope,
                                        const Expr& e);

// True when every terminating path through the statement ends in a return or
// an uncaught throw.
bool always_exits(const Statement& s);

}  // namespace sosie
