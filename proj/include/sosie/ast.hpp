#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sosie {

struct SourcePos {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct TypeExpr {
  enum class Kind { Int, Bool, Str, Array };

  Kind kind = Kind::Int;
  std::shared_ptr<const TypeExpr> elem;  // element type when kind == Array

  static TypeExpr int_type() { return {Kind::Int, nullptr}; }
  static TypeExpr bool_type() { return {Kind::Bool, nullptr}; }
  static TypeExpr str_type() { return {Kind::Str, nullptr}; }
  static TypeExpr array_of(TypeExpr e) {
    return {Kind::Array, std::make_shared<const TypeExpr>(std::move(e))};
  }

  bool is_array() const { return kind == Kind::Array; }
  std::string to_string() const;
};

bool operator==(const TypeExpr& a, const TypeExpr& b);
inline bool operator!=(const TypeExpr& a, const TypeExpr& b) { return !(a == b); }

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr {
  enum class Kind { IntLit, BoolLit, StrLit, ArrayLit, Var, Unary, Binary, Index, Call };
  enum class Op {
    None,
    Add, Sub, Mul, Div, Mod,
    Lt, Le, Gt, Ge, Eq, Ne,
    And, Or,
    Neg, Not,
  };

  Kind kind = Kind::IntLit;
  Op op = Op::None;
  int64_t int_val = 0;
  bool bool_val = false;
  std::string text;        // StrLit value, Var name, or Call callee
  std::vector<Expr> args;  // operands, array elements, call args; Index: {base, index}
  SourcePos pos;

  static Expr int_lit(int64_t v) {
    Expr e; e.kind = Kind::IntLit; e.int_val = v; return e;
  }
  static Expr var(std::string name) {
    Expr e; e.kind = Kind::Var; e.text = std::move(name); return e;
  }
};

const char* op_symbol(Expr::Op op);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind {
  VarDecl, Assign, ExprStmt, If, While, Return, Break, Continue, Throw, Try, Block,
  Assert,  // test units only
};

const char* stmt_kind_name(StmtKind k);
std::optional<StmtKind> stmt_kind_from_name(const std::string& name);

// Stable address of a statement: unit path, function name, and the sequence of
// child indices from the function body root block.
struct StatementId {
  std::string unit_path;
  std::string function;
  std::vector<int32_t> path;

  std::string to_string() const;
  static std::optional<StatementId> parse(const std::string& text);

  bool operator==(const StatementId& o) const {
    return unit_path == o.unit_path && function == o.function && path == o.path;
  }
  bool operator!=(const StatementId& o) const { return !(*this == o); }
  bool operator<(const StatementId& o) const;
};

struct Statement {
  StatementId id;
  StmtKind kind = StmtKind::Block;
  std::string var_name;              // VarDecl / Assign target
  std::optional<TypeExpr> var_type;  // VarDecl
  // VarDecl init, Assign rhs, ExprStmt/Throw/Assert payload, If/While condition,
  // Return value (absent for a bare return).
  std::optional<Expr> expr;
  // Block: the statements. If: {then-block, else-block?}. While: {body}.
  // Try: {guarded-block, handler-block}. Leaf kinds: empty.
  std::vector<Statement> children;
  SourcePos pos;

  bool is_block() const { return kind == StmtKind::Block; }
};

// ---------------------------------------------------------------------------
// Functions, units, programs
// ---------------------------------------------------------------------------

struct Param {
  std::string name;
  TypeExpr type;
};

struct FunctionDecl {
  std::string name;
  std::vector<Param> params;
  std::optional<TypeExpr> return_type;  // nullopt == Void
  Statement body;                       // kind Block
  bool is_test = false;
  SourcePos pos;
};

enum class UnitKind { Program, Test };

struct SourceUnit {
  std::string path;
  UnitKind kind = UnitKind::Program;
  std::vector<FunctionDecl> functions;
};

// A program is a set of source units (program code plus its test suite),
// kept sorted by unit path for deterministic iteration.
struct Program {
  std::vector<SourceUnit> units;

  void sort_units();
};

// ---------------------------------------------------------------------------
// Id assignment, traversal, lookup
// ---------------------------------------------------------------------------

// Assigns depth-first positional ids to every statement in the unit.
// The function body root block gets the empty path.
void assign_ids(SourceUnit& unit);

// Visits root and every descendant statement (blocks included), pre-order.
void for_each_statement(const Statement& root,
                        const std::function<void(const Statement&)>& fn);
void for_each_statement(Statement& root, const std::function<void(Statement&)>& fn);

// Number of non-block statements in the subtree (root included if non-block).
// Braces are containers, not statements, for all counting purposes.
int64_t count_statements(const Statement& root);
int64_t count_statements(const FunctionDecl& fn);
int64_t count_program_statements(const Program& program);

// Fast lookup tables over an immutable program.
struct ProgramIndex {
  std::unordered_map<std::string, const FunctionDecl*> functions;  // program units only
  std::unordered_map<std::string, const Statement*> statements;    // all units, by id string
  std::unordered_map<std::string, const SourceUnit*> units;

  static ProgramIndex build(const Program& program);
  const Statement* find(const StatementId& id) const;
  const FunctionDecl* find_function(const std::string& name) const;
};

// Structural equality ignoring source positions.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Statement& a, const Statement& b);
bool structurally_equal(const FunctionDecl& a, const FunctionDecl& b);
bool structurally_equal(const SourceUnit& a, const SourceUnit& b);
bool structurally_equal(const Program& a, const Program& b);

}  // namespace sosie
