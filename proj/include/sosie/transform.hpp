#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosie/ast.hpp"
#include "sosie/rng.hpp"
#include "sosie/typecheck.hpp"

namespace sosie {

enum class OpKind { Add, Delete, Replace };

const char* op_kind_name(OpKind op);  // "add" / "delete" / "replace"
std::optional<OpKind> op_kind_from_name(const std::string& name);

// One transformation attempt: operator, transplantation point, transplant,
// and the variable maps that make the transplant fit the point's namespace.
struct TransformationSpec {
  OpKind op = OpKind::Delete;
  StatementId point;
  std::optional<StatementId> transplant;            // none for Delete
  std::map<std::string, std::string> renaming;      // free variable -> in-scope variable
  std::map<std::string, std::string> fresh_names;   // declared variable -> fresh name
};

struct FreeVar {
  std::string name;
  TypeExpr type;
};

struct Candidate {
  StatementId transplant;
  StmtKind transplant_kind = StmtKind::ExprStmt;
  // per free variable (name order): the in-scope names at the point with an
  // identical type, in declaration order — every list is nonempty
  std::vector<std::pair<FreeVar, std::vector<std::string>>> renaming_options;
};

struct CandidateSet {
  OpKind op = OpKind::Delete;
  StatementId point;
  std::vector<Candidate> candidates;  // empty for Delete (no transplant needed)
};

class NotATransplantationPoint : public std::runtime_error {
 public:
  explicit NotATransplantationPoint(const std::string& message)
      : std::runtime_error(message) {}
};

class IllegalSpec : public std::runtime_error {
 public:
  explicit IllegalSpec(const std::string& message) : std::runtime_error(message) {}
};

// Free variables of the subtree, name-sorted: variables referenced but not
// declared within it. Types come from the scope at the statement itself.
std::vector<FreeVar> free_variables(const Statement& root, const ScopeTable& scope);

// Declared variable names of the subtree, first-declaration order, unique.
std::vector<std::string> declared_variables(const Statement& root);

// True when the statement sits inside a loop body of its function.
bool inside_loop(const Program& program, const StatementId& id);

// Enumerates every transplant satisfying the operator constraints at the
// point. Candidates come from program units of the same program only, in
// program order. Throws NotATransplantationPoint for blocks, test-unit
// statements, and unknown ids.
CandidateSet legal_transplants(const Program& program, const ProgramIndex& idx,
                               const ScopeTable& scope, const StatementId& point, OpKind op);

struct RenamingDraw {
  std::map<std::string, std::string> renaming;
  std::map<std::string, std::string> fresh_names;
};

// Uniform draw of one in-scope variable per free variable; declared names are
// renamed to fresh ones only when they would collide in the target function.
RenamingDraw draw_renaming(const Program& program, const ProgramIndex& idx,
                           const Candidate& candidate, const StatementId& point, Rng& rng);

// Applies the edit to a deep copy; the input program is never modified.
// Statement ids of the edited unit are reassigned. Throws IllegalSpec when
// the spec violates any legality rule.
Program apply_transformation(const Program& program, const ProgramIndex& idx,
                             const ScopeTable& scope, const TransformationSpec& spec);

// TransformationSpec <-> JSON (embedded in trial records).
std::string spec_to_json(const TransformationSpec& spec);

}  // namespace sosie
