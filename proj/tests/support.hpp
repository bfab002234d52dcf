#pragma once

// Shared helpers for the test suites: program builders, a collecting event
// sink, and seeded random program generators.

#include <string>
#include <utility>
#include <vector>

#include "sosie/ast.hpp"
#include "sosie/interp.hpp"
#include "sosie/parser.hpp"
#include "sosie/rng.hpp"

namespace sosie::test {

inline std::string fixture_path(const std::string& rel) {
  return std::string(SOSIE_SOURCE_DIR) + "/" + rel;
}

// Builds a program from inline sources: firsts are program units, seconds
// are test units. Paths default to src/u<i>.mini and tests/t<i>.mini.
inline Program make_program(const std::vector<std::string>& program_sources,
                            const std::vector<std::string>& test_sources = {}) {
  Program program;
  for (size_t i = 0; i < program_sources.size(); ++i) {
    program.units.push_back(parse(program_sources[i], "src/u" + std::to_string(i) + ".mini",
                                  UnitKind::Program));
  }
  for (size_t i = 0; i < test_sources.size(); ++i) {
    program.units.push_back(
        parse(test_sources[i], "tests/t" + std::to_string(i) + ".mini", UnitKind::Test));
  }
  program.sort_units();
  return program;
}

class CollectingSink : public EventSink {
 public:
  void on_event(const ExecutionEvent& event) override { events.push_back(event); }

  int64_t hits() const {
    int64_t n = 0;
    for (const auto& e : events) n += e.kind == ExecutionEvent::Kind::StatementHit ? 1 : 0;
    return n;
  }

  std::vector<ExecutionEvent> events;
};

// ---------------------------------------------------------------------------
// Random well-formed units (structure only, not necessarily well-typed) for
// parse/pretty round-trip properties.
// ---------------------------------------------------------------------------

struct AstGen {
  Rng rng;

  explicit AstGen(uint64_t seed) : rng(make_rng(seed)) {}

  std::string name() { return "v" + std::to_string(rng.below(8)); }

  TypeExpr type(int depth = 0) {
    switch (rng.below(depth < 2 ? 4 : 3)) {
      case 0: return TypeExpr::int_type();
      case 1: return TypeExpr::bool_type();
      case 2: return TypeExpr::str_type();
      default: return TypeExpr::array_of(type(depth + 1));
    }
  }

  Expr expr(int depth) {
    Expr e;
    uint64_t pick = rng.below(depth >= 3 ? 5 : 9);
    switch (pick) {
      case 0:
        e.kind = Expr::Kind::IntLit;
        e.int_val = static_cast<int64_t>(rng.below(2000)) - 1000;
        if (e.int_val < 0) {  // negative literals print as unary minus
          Expr neg;
          neg.kind = Expr::Kind::Unary;
          neg.op = Expr::Op::Neg;
          e.int_val = -e.int_val;
          neg.args.push_back(std::move(e));
          return neg;
        }
        return e;
      case 1:
        e.kind = Expr::Kind::BoolLit;
        e.bool_val = rng.below(2) == 0;
        return e;
      case 2: {
        e.kind = Expr::Kind::StrLit;
        static const char* samples[] = {"", "plain", "with \"quotes\"", "tab\there",
                                        "line\nbreak", "back\\slash", "mixed \t\r\n \\\""};
        e.text = samples[rng.below(7)];
        return e;
      }
      case 3:
        e.kind = Expr::Kind::Var;
        e.text = name();
        return e;
      case 4: {
        e.kind = Expr::Kind::Unary;
        e.op = rng.below(2) == 0 ? Expr::Op::Neg : Expr::Op::Not;
        e.args.push_back(expr(depth + 1));
        return e;
      }
      case 5: {
        e.kind = Expr::Kind::Binary;
        static const Expr::Op ops[] = {Expr::Op::Add, Expr::Op::Sub, Expr::Op::Mul,
                                       Expr::Op::Div, Expr::Op::Mod, Expr::Op::Lt,
                                       Expr::Op::Le,  Expr::Op::Gt,  Expr::Op::Ge,
                                       Expr::Op::Eq,  Expr::Op::Ne,  Expr::Op::And,
                                       Expr::Op::Or};
        e.op = ops[rng.below(13)];
        e.args.push_back(expr(depth + 1));
        e.args.push_back(expr(depth + 1));
        return e;
      }
      case 6: {
        e.kind = Expr::Kind::Index;
        e.args.push_back(expr(depth + 1));
        e.args.push_back(expr(depth + 1));
        return e;
      }
      case 7: {
        e.kind = Expr::Kind::Call;
        e.text = "f" + std::to_string(rng.below(4));
        for (uint64_t i = rng.below(3); i > 0; --i) e.args.push_back(expr(depth + 1));
        return e;
      }
      default: {
        e.kind = Expr::Kind::ArrayLit;
        for (uint64_t i = rng.below(4); i > 0; --i) e.args.push_back(expr(depth + 1));
        return e;
      }
    }
  }

  Statement block(int depth, bool in_test) {
    Statement b;
    b.kind = StmtKind::Block;
    uint64_t n = depth >= 3 ? rng.below(2) : rng.below(4);
    for (uint64_t i = 0; i < n; ++i) b.children.push_back(stmt(depth + 1, in_test));
    return b;
  }

  Statement stmt(int depth, bool in_test) {
    Statement s;
    switch (rng.below(depth >= 3 ? 6 : 12)) {
      case 0:
        s.kind = StmtKind::VarDecl;
        s.var_name = name();
        s.var_type = type();
        s.expr = expr(depth);
        return s;
      case 1:
        s.kind = StmtKind::Assign;
        s.var_name = name();
        s.expr = expr(depth);
        return s;
      case 2:
        s.kind = StmtKind::ExprStmt;
        s.expr = expr(depth);
        return s;
      case 3:
        s.kind = StmtKind::Return;
        if (rng.below(3) > 0) s.expr = expr(depth);
        return s;
      case 4:
        s.kind = rng.below(2) == 0 ? StmtKind::Break : StmtKind::Continue;
        return s;
      case 5:
        if (in_test && rng.below(2) == 0) {
          s.kind = StmtKind::Assert;
          s.expr = expr(depth);
          return s;
        }
        s.kind = StmtKind::Throw;
        s.expr = expr(depth);
        return s;
      case 6:
      case 7: {
        s.kind = StmtKind::If;
        s.expr = expr(depth);
        s.children.push_back(block(depth + 1, in_test));
        if (rng.below(2) == 0) s.children.push_back(block(depth + 1, in_test));
        return s;
      }
      case 8: {
        s.kind = StmtKind::While;
        s.expr = expr(depth);
        s.children.push_back(block(depth + 1, in_test));
        return s;
      }
      case 9: {
        s.kind = StmtKind::Try;
        s.children.push_back(block(depth + 1, in_test));
        s.children.push_back(block(depth + 1, in_test));
        return s;
      }
      default:
        return block(depth + 1, in_test);
    }
  }

  SourceUnit unit(const std::string& path, UnitKind kind) {
    SourceUnit u;
    u.path = path;
    u.kind = kind;
    uint64_t fns = 1 + rng.below(3);
    for (uint64_t i = 0; i < fns; ++i) {
      FunctionDecl fn;
      fn.name = kind == UnitKind::Test ? "test_g" + std::to_string(i) : "f" + std::to_string(i);
      fn.is_test = kind == UnitKind::Test;
      for (uint64_t p = rng.below(4); p > 0; --p) {
        fn.params.push_back({"p" + std::to_string(p), type()});
      }
      if (rng.below(2) == 0) fn.return_type = type();
      fn.body = block(0, kind == UnitKind::Test);
      u.functions.push_back(std::move(fn));
    }
    assign_ids(u);
    return u;
  }
};

// ---------------------------------------------------------------------------
// Random well-typed, terminating programs with green test suites, for
// interpreter/sesig/campaign properties. Loops advance their counter first,
// so break/continue placement can never spin; no throwing operators are
// generated outside try blocks.
// ---------------------------------------------------------------------------

struct TypedGen {
  Rng rng;
  int fresh = 0;

  struct Var {
    std::string name;
    TypeExpr type;
  };

  struct FnInfo {
    std::string name;
    std::vector<TypeExpr> params;
    bool returns_int = false;
  };

  std::vector<FnInfo> fns;

  explicit TypedGen(uint64_t seed) : rng(make_rng(seed)) {}

  static Expr lit_int(int64_t v) {
    if (v >= 0) return Expr::int_lit(v);
    Expr neg;
    neg.kind = Expr::Kind::Unary;
    neg.op = Expr::Op::Neg;
    neg.args.push_back(Expr::int_lit(-v));
    return neg;
  }

  static Expr binary(Expr::Op op, Expr a, Expr b) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.op = op;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  static Expr call(const std::string& callee, std::vector<Expr> args) {
    Expr e;
    e.kind = Expr::Kind::Call;
    e.text = callee;
    e.args = std::move(args);
    return e;
  }

  const Var* pick_var(const std::vector<Var>& env, TypeExpr::Kind kind) {
    std::vector<const Var*> matches;
    for (const auto& v : env) {
      if (v.type.kind == kind) matches.push_back(&v);
    }
    if (matches.empty()) return nullptr;
    return matches[rng.below(matches.size())];
  }

  Expr int_expr(const std::vector<Var>& env, int depth) {
    uint64_t pick = rng.below(depth >= 2 ? 2 : 6);
    switch (pick) {
      case 0:
        return lit_int(static_cast<int64_t>(rng.below(19)) - 4);
      case 1: {
        const Var* v = pick_var(env, TypeExpr::Kind::Int);
        if (v) return Expr::var(v->name);
        return lit_int(static_cast<int64_t>(rng.below(7)));
      }
      case 2:
      case 3: {
        static const Expr::Op ops[] = {Expr::Op::Add, Expr::Op::Sub, Expr::Op::Mul};
        return binary(ops[rng.below(3)], int_expr(env, depth + 1), int_expr(env, depth + 1));
      }
      case 4: {
        const Var* v = pick_var(env, TypeExpr::Kind::Str);
        if (v) return call("len", {Expr::var(v->name)});
        const Var* a = pick_var(env, TypeExpr::Kind::Array);
        if (a) return call("len", {Expr::var(a->name)});
        return lit_int(1);
      }
      default: {
        // call a previously generated Int function
        std::vector<const FnInfo*> callable;
        for (const auto& fn : fns) {
          if (fn.returns_int) callable.push_back(&fn);
        }
        if (callable.empty()) return int_expr(env, depth + 1);
        const FnInfo* fn = callable[rng.below(callable.size())];
        std::vector<Expr> args;
        for (const auto& p : fn->params) args.push_back(literal_of(p));
        return call(fn->name, std::move(args));
      }
    }
  }

  Expr bool_expr(const std::vector<Var>& env, int depth) {
    uint64_t pick = rng.below(depth >= 2 ? 2 : 5);
    switch (pick) {
      case 0: {
        Expr e;
        e.kind = Expr::Kind::BoolLit;
        e.bool_val = rng.below(2) == 0;
        return e;
      }
      case 1: {
        const Var* v = pick_var(env, TypeExpr::Kind::Bool);
        if (v) return Expr::var(v->name);
        Expr e;
        e.kind = Expr::Kind::BoolLit;
        e.bool_val = true;
        return e;
      }
      case 2: {
        static const Expr::Op ops[] = {Expr::Op::Lt, Expr::Op::Le, Expr::Op::Gt, Expr::Op::Ge,
                                       Expr::Op::Eq, Expr::Op::Ne};
        return binary(ops[rng.below(6)], int_expr(env, depth + 1), int_expr(env, depth + 1));
      }
      case 3: {
        Expr e;
        e.kind = Expr::Kind::Unary;
        e.op = Expr::Op::Not;
        e.args.push_back(bool_expr(env, depth + 1));
        return e;
      }
      default:
        return binary(rng.below(2) == 0 ? Expr::Op::And : Expr::Op::Or,
                      bool_expr(env, depth + 1), bool_expr(env, depth + 1));
    }
  }

  Expr str_expr(const std::vector<Var>& env, int depth) {
    if (depth < 2 && rng.below(3) == 0) {
      return binary(Expr::Op::Add, str_expr(env, depth + 1), str_expr(env, depth + 1));
    }
    if (const Var* v = pick_var(env, TypeExpr::Kind::Str); v && rng.below(2) == 0) {
      return Expr::var(v->name);
    }
    Expr e;
    e.kind = Expr::Kind::StrLit;
    static const char* words[] = {"ws", "tok", "", "abc", "zz"};
    e.text = words[rng.below(5)];
    return e;
  }

  Expr literal_of(const TypeExpr& t) {
    switch (t.kind) {
      case TypeExpr::Kind::Int: return lit_int(static_cast<int64_t>(rng.below(9)));
      case TypeExpr::Kind::Bool: {
        Expr e;
        e.kind = Expr::Kind::BoolLit;
        e.bool_val = rng.below(2) == 0;
        return e;
      }
      case TypeExpr::Kind::Str: {
        Expr e;
        e.kind = Expr::Kind::StrLit;
        e.text = "s" + std::to_string(rng.below(5));
        return e;
      }
      case TypeExpr::Kind::Array: {
        Expr e;
        e.kind = Expr::Kind::ArrayLit;
        e.args.push_back(literal_of(*t.elem));
        return e;
      }
    }
    return Expr::int_lit(0);
  }

  Expr expr_of(const std::vector<Var>& env, const TypeExpr& t, int depth) {
    switch (t.kind) {
      case TypeExpr::Kind::Int: return int_expr(env, depth);
      case TypeExpr::Kind::Bool: return bool_expr(env, depth);
      case TypeExpr::Kind::Str: return str_expr(env, depth);
      case TypeExpr::Kind::Array: return literal_of(t);
    }
    return Expr::int_lit(0);
  }

  Statement var_decl(std::vector<Var>& env, const TypeExpr& t) {
    Statement s;
    s.kind = StmtKind::VarDecl;
    s.var_name = "x" + std::to_string(fresh++);
    s.var_type = t;
    s.expr = expr_of(env, t, 1);
    env.push_back({s.var_name, t});
    return s;
  }

  std::vector<Statement> statements(std::vector<Var>& env, int depth, int budget, bool in_loop);

  Statement while_loop(std::vector<Var>& env, int depth) {
    // counter-first loops always terminate
    std::string counter = "c" + std::to_string(fresh++);
    Statement decl;
    decl.kind = StmtKind::VarDecl;
    decl.var_name = counter;
    decl.var_type = TypeExpr::int_type();
    decl.expr = Expr::int_lit(0);

    Statement loop;
    loop.kind = StmtKind::While;
    loop.expr = binary(Expr::Op::Lt, Expr::var(counter), lit_int(1 + rng.below(3)));
    Statement body;
    body.kind = StmtKind::Block;
    Statement inc;
    inc.kind = StmtKind::Assign;
    inc.var_name = counter;
    inc.expr = binary(Expr::Op::Add, Expr::var(counter), Expr::int_lit(1));
    body.children.push_back(std::move(inc));
    size_t env_mark = env.size();
    for (auto& extra : statements(env, depth + 1, static_cast<int>(rng.below(3)), true)) {
      body.children.push_back(std::move(extra));
    }
    env.resize(env_mark);
    loop.children.push_back(std::move(body));

    Statement wrapper;
    wrapper.kind = StmtKind::Block;
    wrapper.children.push_back(std::move(decl));
    wrapper.children.push_back(std::move(loop));
    return wrapper;
  }

  Statement statement(std::vector<Var>& env, int depth, bool in_loop) {
    switch (rng.below(depth >= 2 ? 4 : 8)) {
      case 0:
        return var_decl(env, TypeExpr::int_type());
      case 1: {
        const Var* v = pick_var(env, TypeExpr::Kind::Int);
        if (!v) return var_decl(env, TypeExpr::int_type());
        Statement s;
        s.kind = StmtKind::Assign;
        s.var_name = v->name;
        s.expr = int_expr(env, 1);
        return s;
      }
      case 2: {
        Statement s;
        s.kind = StmtKind::ExprStmt;
        s.expr = int_expr(env, 1);
        return s;
      }
      case 3: {
        if (in_loop && rng.below(3) == 0) {
          Statement s;
          s.kind = rng.below(2) == 0 ? StmtKind::Break : StmtKind::Continue;
          return s;
        }
        Statement s;
        s.kind = StmtKind::If;
        s.expr = bool_expr(env, 1);
        Statement then_block;
        then_block.kind = StmtKind::Block;
        size_t mark = env.size();
        for (auto& c : statements(env, depth + 1, static_cast<int>(rng.below(3)), in_loop)) {
          then_block.children.push_back(std::move(c));
        }
        env.resize(mark);
        s.children.push_back(std::move(then_block));
        if (rng.below(2) == 0) {
          Statement else_block;
          else_block.kind = StmtKind::Block;
          for (auto& c : statements(env, depth + 1, static_cast<int>(rng.below(2)), in_loop)) {
            else_block.children.push_back(std::move(c));
          }
          env.resize(mark);
          s.children.push_back(std::move(else_block));
        }
        return s;
      }
      case 4:
        return while_loop(env, depth);
      case 5: {
        // try { maybe throw } catch { ... }
        Statement s;
        s.kind = StmtKind::Try;
        Statement guarded;
        guarded.kind = StmtKind::Block;
        if (rng.below(2) == 0) {
          Statement th;
          th.kind = StmtKind::Throw;
          th.expr = str_expr(env, 1);
          guarded.children.push_back(std::move(th));
        } else {
          Statement e;
          e.kind = StmtKind::ExprStmt;
          e.expr = int_expr(env, 1);
          guarded.children.push_back(std::move(e));
        }
        Statement handler;
        handler.kind = StmtKind::Block;
        size_t mark = env.size();
        for (auto& c : statements(env, depth + 1, static_cast<int>(rng.below(2)), in_loop)) {
          handler.children.push_back(std::move(c));
        }
        env.resize(mark);
        s.children.push_back(std::move(guarded));
        s.children.push_back(std::move(handler));
        return s;
      }
      case 6:
        return var_decl(env, rng.below(2) == 0 ? TypeExpr::str_type()
                                               : TypeExpr::array_of(TypeExpr::int_type()));
      default: {
        const Var* a = pick_var(env, TypeExpr::Kind::Array);
        if (a) {
          Statement s;
          s.kind = StmtKind::ExprStmt;
          s.expr = call("push", {Expr::var(a->name), int_expr(env, 1)});
          return s;
        }
        return var_decl(env, TypeExpr::bool_type());
      }
    }
  }

  FunctionDecl function(const std::string& fn_name) {
    FunctionDecl fn;
    fn.name = fn_name;
    FnInfo info;
    info.name = fn_name;
    std::vector<Var> env;
    uint64_t params = rng.below(3);
    for (uint64_t p = 0; p < params; ++p) {
      TypeExpr t = rng.below(3) == 0 ? TypeExpr::str_type() : TypeExpr::int_type();
      std::string pname = "a" + std::to_string(p);
      fn.params.push_back({pname, t});
      info.params.push_back(t);
      env.push_back({pname, t});
    }
    bool returns_int = rng.below(10) < 7;
    info.returns_int = returns_int;
    if (returns_int) fn.return_type = TypeExpr::int_type();
    fn.body.kind = StmtKind::Block;
    for (auto& s : statements(env, 0, 2 + static_cast<int>(rng.below(4)), false)) {
      fn.body.children.push_back(std::move(s));
    }
    if (returns_int) {
      Statement ret;
      ret.kind = StmtKind::Return;
      ret.expr = int_expr(env, 1);
      fn.body.children.push_back(std::move(ret));
    }
    fns.push_back(std::move(info));
    return fn;
  }

  Program program() {
    Program prog;
    SourceUnit unit;
    unit.path = "src/gen.mini";
    unit.kind = UnitKind::Program;
    uint64_t count = 2 + rng.below(3);
    for (uint64_t i = 0; i < count; ++i) {
      unit.functions.push_back(function("g" + std::to_string(i)));
    }
    assign_ids(unit);

    SourceUnit tests;
    tests.path = "tests/gen_tests.mini";
    tests.kind = UnitKind::Test;
    int t = 0;
    for (const auto& fn : fns) {
      FunctionDecl tf;
      tf.name = "test_" + std::to_string(t++);
      tf.is_test = true;
      tf.body.kind = StmtKind::Block;
      std::vector<Expr> args;
      for (const auto& p : fn.params) args.push_back(literal_of(p));
      if (fn.returns_int) {
        Statement a;
        a.kind = StmtKind::Assert;
        a.expr = binary(Expr::Op::Eq, call(fn.name, args), call(fn.name, args));
        tf.body.children.push_back(std::move(a));
      } else {
        Statement e;
        e.kind = StmtKind::ExprStmt;
        e.expr = call(fn.name, args);
        tf.body.children.push_back(std::move(e));
        Statement a;
        a.kind = StmtKind::Assert;
        Expr lit;
        lit.kind = Expr::Kind::BoolLit;
        lit.bool_val = true;
        a.expr = lit;
        tf.body.children.push_back(std::move(a));
      }
      tests.functions.push_back(std::move(tf));
    }
    assign_ids(tests);

    prog.units.push_back(std::move(unit));
    prog.units.push_back(std::move(tests));
    prog.sort_units();
    return prog;
  }
};

inline std::vector<Statement> TypedGen::statements(std::vector<Var>& env, int depth, int budget,
                                                   bool in_loop) {
  std::vector<Statement> out;
  for (int i = 0; i < budget; ++i) out.push_back(statement(env, depth, in_loop));
  return out;
}

}  // namespace sosie::test
