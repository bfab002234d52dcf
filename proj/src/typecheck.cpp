#include "sosie/typecheck.hpp"

#include <unordered_set>

#include "sosie/diag.hpp"

namespace sosie {

namespace {

struct FnSig {
  const FunctionDecl* decl;
  const SourceUnit* unit;
};

using OptType = std::optional<TypeExpr>;

struct Checker {
  const Program& program;
  std::unordered_map<std::string, FnSig> functions;  // program units only
  ScopeTable table;

  // per-function state
  const FunctionDecl* fn = nullptr;
  std::vector<ScopeEntry> scope;
  const StatementId* current = nullptr;
  int loop_depth = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw TypeError(current ? std::optional<StatementId>(*current) : std::nullopt, msg);
  }

  const ScopeEntry* lookup(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

  void run() {
    collect_functions();
    for (const auto& unit : program.units) {
      check_unit_shape(unit);
    }
    for (const auto& unit : program.units) {
      for (const auto& f : unit.functions) check_function(unit, f);
    }
  }

  void collect_functions() {
    for (const auto& unit : program.units) {
      if (unit.kind != UnitKind::Program) continue;
      for (const auto& f : unit.functions) {
        auto [it, inserted] = functions.emplace(f.name, FnSig{&f, &unit});
        if (!inserted) {
          current = nullptr;
          fail("duplicate function '" + f.name + "' in " + unit.path + " and " +
               it->second.unit->path);
        }
      }
    }
  }

  void check_unit_shape(const SourceUnit& unit) {
    std::unordered_set<std::string> names;
    for (const auto& f : unit.functions) {
      current = nullptr;
      if (!names.insert(f.name).second) {
        fail("duplicate function '" + f.name + "' in unit " + unit.path);
      }
      if (unit.kind == UnitKind::Test) {
        if (!f.is_test) {
          fail("test unit " + unit.path + " contains non-test function '" + f.name +
               "' (test functions must be prefixed 'test_')");
        }
        if (!f.params.empty()) fail("test function '" + f.name + "' must take no parameters");
        if (f.return_type) fail("test function '" + f.name + "' must not declare a return type");
      }
    }
  }

  void check_function(const SourceUnit& unit, const FunctionDecl& f) {
    fn = &f;
    scope.clear();
    loop_depth = 0;
    std::unordered_set<std::string> param_names;
    for (const auto& p : f.params) {
      current = &f.body.id;
      if (!param_names.insert(p.name).second) {
        fail("duplicate parameter '" + p.name + "' in function '" + f.name + "'");
      }
      scope.push_back({p.name, p.type});
    }
    check_block(f.body, unit);
    if (f.return_type && !always_exits(f.body)) {
      current = &f.body.id;
      fail("function '" + f.name + "' does not return a value on every path");
    }
  }

  void check_block(const Statement& block, const SourceUnit& unit) {
    table.put(block.id, scope);
    size_t mark = scope.size();
    for (const auto& child : block.children) check_stmt(child, unit);
    scope.resize(mark);
  }

  void check_stmt(const Statement& s, const SourceUnit& unit) {
    current = &s.id;
    if (s.kind != StmtKind::Block) table.put(s.id, scope);
    switch (s.kind) {
      case StmtKind::VarDecl: {
        TypeExpr got = require_value(check_expr(*s.expr, &*s.var_type), "initializer");
        if (got != *s.var_type) {
          fail("cannot initialize '" + s.var_name + "' of type " + s.var_type->to_string() +
               " with a value of type " + got.to_string());
        }
        current = &s.id;
        if (lookup(s.var_name)) fail("redeclaration of '" + s.var_name + "'");
        scope.push_back({s.var_name, *s.var_type});
        return;
      }
      case StmtKind::Assign: {
        const ScopeEntry* entry = lookup(s.var_name);
        if (!entry) fail("assignment to undeclared variable '" + s.var_name + "'");
        TypeExpr target = entry->type;
        TypeExpr got = require_value(check_expr(*s.expr, &target), "assigned value");
        if (got != target) {
          fail("cannot assign " + got.to_string() + " to '" + s.var_name + "' of type " +
               target.to_string());
        }
        return;
      }
      case StmtKind::ExprStmt:
        check_expr(*s.expr, nullptr);
        return;
      case StmtKind::If:
      case StmtKind::While: {
        TypeExpr cond = require_value(check_expr(*s.expr, nullptr), "condition");
        if (cond.kind != TypeExpr::Kind::Bool) {
          fail("condition must be Bool, found " + cond.to_string());
        }
        if (s.kind == StmtKind::While) ++loop_depth;
        for (const auto& child : s.children) check_block(child, unit);
        if (s.kind == StmtKind::While) --loop_depth;
        return;
      }
      case StmtKind::Return: {
        if (!fn->return_type) {
          if (s.expr) fail("function '" + fn->name + "' returns no value");
          return;
        }
        if (!s.expr) fail("function '" + fn->name + "' must return " + fn->return_type->to_string());
        TypeExpr expected = *fn->return_type;
        TypeExpr got = require_value(check_expr(*s.expr, &expected), "return value");
        if (got != expected) {
          fail("function '" + fn->name + "' returns " + expected.to_string() + ", found " +
               got.to_string());
        }
        return;
      }
      case StmtKind::Break:
      case StmtKind::Continue:
        if (loop_depth == 0) {
          fail(std::string(s.kind == StmtKind::Break ? "'break'" : "'continue'") +
               " outside of a loop");
        }
        return;
      case StmtKind::Throw: {
        TypeExpr got = require_value(check_expr(*s.expr, nullptr), "throw payload");
        if (got.kind != TypeExpr::Kind::Str) {
          fail("throw payload must be Str, found " + got.to_string());
        }
        return;
      }
      case StmtKind::Try:
        check_block(s.children[0], unit);
        current = &s.id;
        check_block(s.children[1], unit);
        return;
      case StmtKind::Block:
        check_block(s, unit);
        return;
      case StmtKind::Assert: {
        if (!fn->is_test) fail("'assert' is only allowed in test functions");
        TypeExpr got = require_value(check_expr(*s.expr, nullptr), "assertion");
        if (got.kind != TypeExpr::Kind::Bool) {
          fail("assertion must be Bool, found " + got.to_string());
        }
        return;
      }
    }
  }

  TypeExpr require_value(const OptType& t, const char* what) const {
    if (!t) fail(std::string("void call used as ") + what);
    return *t;
  }

  // expected steers empty array literals; it is a hint, not a coercion.
  OptType check_expr(const Expr& e, const TypeExpr* expected) {
    switch (e.kind) {
      case Expr::Kind::IntLit: return TypeExpr::int_type();
      case Expr::Kind::BoolLit: return TypeExpr::bool_type();
      case Expr::Kind::StrLit: return TypeExpr::str_type();
      case Expr::Kind::Var: {
        const ScopeEntry* entry = lookup(e.text);
        if (!entry) fail("unknown variable '" + e.text + "'");
        return entry->type;
      }
      case Expr::Kind::ArrayLit: {
        if (e.args.empty()) {
          if (!expected || expected->kind != TypeExpr::Kind::Array) {
            fail("cannot infer the element type of an empty array literal");
          }
          return *expected;
        }
        const TypeExpr* elem_hint = nullptr;
        if (expected && expected->kind == TypeExpr::Kind::Array) elem_hint = expected->elem.get();
        TypeExpr first = require_value(check_expr(e.args[0], elem_hint), "array element");
        for (size_t i = 1; i < e.args.size(); ++i) {
          TypeExpr t = require_value(check_expr(e.args[i], &first), "array element");
          if (t != first) {
            fail("array literal mixes " + first.to_string() + " and " + t.to_string());
          }
        }
        return TypeExpr::array_of(first);
      }
      case Expr::Kind::Unary: {
        TypeExpr t = require_value(check_expr(e.args[0], nullptr), "operand");
        if (e.op == Expr::Op::Neg) {
          if (t.kind != TypeExpr::Kind::Int) fail("unary '-' needs Int, found " + t.to_string());
          return t;
        }
        if (t.kind != TypeExpr::Kind::Bool) fail("'!' needs Bool, found " + t.to_string());
        return t;
      }
      case Expr::Kind::Binary: return check_binary(e);
      case Expr::Kind::Index: {
        TypeExpr base = require_value(check_expr(e.args[0], nullptr), "indexed value");
        if (base.kind != TypeExpr::Kind::Array) {
          fail("only arrays can be indexed, found " + base.to_string());
        }
        TypeExpr idx = require_value(check_expr(e.args[1], nullptr), "index");
        if (idx.kind != TypeExpr::Kind::Int) fail("index must be Int, found " + idx.to_string());
        return *base.elem;
      }
      case Expr::Kind::Call: return check_call(e);
    }
    fail("unreachable expression kind");
  }

  OptType check_binary(const Expr& e) {
    using Op = Expr::Op;
    switch (e.op) {
      case Op::Add: {
        TypeExpr lhs = require_value(check_expr(e.args[0], nullptr), "operand");
        TypeExpr rhs = require_value(check_expr(e.args[1], &lhs), "operand");
        if (lhs.kind == TypeExpr::Kind::Int && rhs.kind == TypeExpr::Kind::Int)
          return TypeExpr::int_type();
        if (lhs.kind == TypeExpr::Kind::Str && rhs.kind == TypeExpr::Kind::Str)
          return TypeExpr::str_type();
        fail("'+' needs two Ints or two Strs, found " + lhs.to_string() + " and " +
             rhs.to_string());
      }
      case Op::Sub: case Op::Mul: case Op::Div: case Op::Mod: {
        check_int_pair(e);
        return TypeExpr::int_type();
      }
      case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: {
        check_int_pair(e);
        return TypeExpr::bool_type();
      }
      case Op::Eq: case Op::Ne: {
        TypeExpr lhs = require_value(check_expr(e.args[0], nullptr), "operand");
        TypeExpr rhs = require_value(check_expr(e.args[1], &lhs), "operand");
        if (lhs != rhs) {
          fail("cannot compare " + lhs.to_string() + " with " + rhs.to_string());
        }
        return TypeExpr::bool_type();
      }
      case Op::And: case Op::Or: {
        for (int i = 0; i < 2; ++i) {
          TypeExpr t = require_value(check_expr(e.args[i], nullptr), "operand");
          if (t.kind != TypeExpr::Kind::Bool) {
            fail(std::string("'") + op_symbol(e.op) + "' needs Bool operands, found " +
                 t.to_string());
          }
        }
        return TypeExpr::bool_type();
      }
      default:
        fail("unreachable binary operator");
    }
  }

  void check_int_pair(const Expr& e) {
    for (int i = 0; i < 2; ++i) {
      TypeExpr t = require_value(check_expr(e.args[i], nullptr), "operand");
      if (t.kind != TypeExpr::Kind::Int) {
        fail(std::string("'") + op_symbol(e.op) + "' needs Int operands, found " + t.to_string());
      }
    }
  }

  OptType check_call(const Expr& e) {
    if (auto builtin = check_builtin_call(e)) return *builtin;
    auto it = functions.find(e.text);
    if (it == functions.end()) fail("unknown function '" + e.text + "'");
    const FunctionDecl* callee = it->second.decl;
    if (e.args.size() != callee->params.size()) {
      fail("'" + e.text + "' takes " + std::to_string(callee->params.size()) +
           " argument(s), found " + std::to_string(e.args.size()));
    }
    for (size_t i = 0; i < e.args.size(); ++i) {
      TypeExpr expected = callee->params[i].type;
      TypeExpr got = require_value(check_expr(e.args[i], &expected), "argument");
      if (got != expected) {
        fail("argument " + std::to_string(i + 1) + " of '" + e.text + "' must be " +
             expected.to_string() + ", found " + got.to_string());
      }
    }
    return callee->return_type ? OptType(*callee->return_type) : OptType(std::nullopt);
  }

  // Returns the call's type wrapped once more: outer nullopt = not a builtin.
  std::optional<OptType> check_builtin_call(const Expr& e) {
    const std::string& name = e.text;
    auto arg = [&](size_t i, const TypeExpr* expected) {
      return require_value(check_expr(e.args[i], expected), "argument");
    };
    auto arity = [&](size_t n) {
      if (e.args.size() != n) {
        fail("builtin '" + name + "' takes " + std::to_string(n) + " argument(s), found " +
             std::to_string(e.args.size()));
      }
    };
    if (name == "len") {
      arity(1);
      TypeExpr t = arg(0, nullptr);
      if (t.kind != TypeExpr::Kind::Str && t.kind != TypeExpr::Kind::Array) {
        fail("'len' needs a Str or Array, found " + t.to_string());
      }
      return OptType(TypeExpr::int_type());
    }
    if (name == "push") {
      arity(2);
      TypeExpr a = arg(0, nullptr);
      if (a.kind != TypeExpr::Kind::Array) fail("'push' needs an Array, found " + a.to_string());
      TypeExpr elem = *a.elem;
      TypeExpr v = arg(1, &elem);
      if (v != elem) fail("'push' element must be " + elem.to_string() + ", found " + v.to_string());
      return OptType(TypeExpr::int_type());
    }
    if (name == "set") {
      arity(3);
      TypeExpr a = arg(0, nullptr);
      if (a.kind != TypeExpr::Kind::Array) fail("'set' needs an Array, found " + a.to_string());
      TypeExpr i = arg(1, nullptr);
      if (i.kind != TypeExpr::Kind::Int) fail("'set' index must be Int, found " + i.to_string());
      TypeExpr elem = *a.elem;
      TypeExpr v = arg(2, &elem);
      if (v != elem) fail("'set' value must be " + elem.to_string() + ", found " + v.to_string());
      return OptType(elem);
    }
    if (name == "ord") {
      arity(2);
      if (arg(0, nullptr).kind != TypeExpr::Kind::Str) fail("'ord' needs a Str first argument");
      if (arg(1, nullptr).kind != TypeExpr::Kind::Int) fail("'ord' index must be Int");
      return OptType(TypeExpr::int_type());
    }
    if (name == "chr") {
      arity(1);
      if (arg(0, nullptr).kind != TypeExpr::Kind::Int) fail("'chr' needs an Int");
      return OptType(TypeExpr::str_type());
    }
    if (name == "substr") {
      arity(3);
      if (arg(0, nullptr).kind != TypeExpr::Kind::Str) fail("'substr' needs a Str first argument");
      if (arg(1, nullptr).kind != TypeExpr::Kind::Int) fail("'substr' start must be Int");
      if (arg(2, nullptr).kind != TypeExpr::Kind::Int) fail("'substr' length must be Int");
      return OptType(TypeExpr::str_type());
    }
    if (name == "to_str") {
      arity(1);
      if (arg(0, nullptr).kind != TypeExpr::Kind::Int) fail("'to_str' needs an Int");
      return OptType(TypeExpr::str_type());
    }
    if (name == "print") {
      arity(1);
      if (arg(0, nullptr).kind != TypeExpr::Kind::Str) fail("'print' needs a Str");
      return OptType(std::nullopt);  // Void
    }
    return std::nullopt;
  }
};

}  // namespace

bool always_exits(const Statement& s) {
  switch (s.kind) {
    case StmtKind::Return:
    case StmtKind::Throw:
      return true;
    case StmtKind::Block:
      for (const auto& child : s.children) {
        if (always_exits(child)) return true;
      }
      return false;
    case StmtKind::If:
      return s.children.size() == 2 && always_exits(s.children[0]) &&
             always_exits(s.children[1]);
    case StmtKind::Try:
      // a throw inside the guarded block lands in the handler, so both
      // blocks must exit on their own
      return always_exits(s.children[0]) && always_exits(s.children[1]);
    default:
      return false;
  }
}

ScopeTable typecheck(const Program& program) {
  Checker checker{program};
  checker.run();
  return std::move(checker.table);
}

std::optional<TypeExpr> infer_expr_type(const ProgramIndex& idx,
                                        const std::vector<ScopeEntry>& scope,
                                        const Expr& e) {
  // reuse the checker in expression-only mode over a synthetic scope
  Program empty;
  Checker checker{empty};
  for (const auto& [name, fn] : idx.functions) {
    checker.functions.emplace(name, FnSig{fn, nullptr});
  }
  checker.scope = scope;
  return checker.check_expr(e, nullptr);
}

}  // namespace sosie
