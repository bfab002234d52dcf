#include "sosie/interp.hpp"

#include <string_view>
#include <unordered_map>

#include "sosie/diag.hpp"

namespace sosie {

bool values_equal(const Value& a, const Value& b) {
  if (a.tag != b.tag) return false;
  switch (a.tag) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::Bool:
      return a.i == b.i;
    case TypeExpr::Kind::Str:
      return *a.str == *b.str;
    case TypeExpr::Kind::Array: {
      if (a.arr->size() != b.arr->size()) return false;
      for (size_t i = 0; i < a.arr->size(); ++i) {
        if (!values_equal((*a.arr)[i], (*b.arr)[i])) return false;
      }
      return true;
    }
  }
  return false;
}

std::string value_display(const Value& v) {
  switch (v.tag) {
    case TypeExpr::Kind::Int: return std::to_string(v.i);
    case TypeExpr::Kind::Bool: return v.i ? "true" : "false";
    case TypeExpr::Kind::Str: return *v.str;
    case TypeExpr::Kind::Array: {
      std::string out = "[";
      for (size_t i = 0; i < v.arr->size(); ++i) {
        if (i > 0) out += ", ";
        out += value_display((*v.arr)[i]);
      }
      return out + "]";
    }
  }
  return "?";
}

namespace {

// Control-flow signals distinct from MiniLang-visible throws.
struct StepLimitExceeded {};
struct AssertFailed {
  const Statement* stmt;
};
struct MiniThrow {
  Value payload;
};

enum class Flow : uint8_t { Normal, Break, Continue, Return };

enum class Builtin { Len, Push, Set, Ord, Chr, Substr, ToStr, Print };

const std::unordered_map<std::string_view, Builtin>& builtin_table() {
  static const std::unordered_map<std::string_view, Builtin> table = {
      {"len", Builtin::Len},       {"push", Builtin::Push},   {"set", Builtin::Set},
      {"ord", Builtin::Ord},       {"chr", Builtin::Chr},     {"substr", Builtin::Substr},
      {"to_str", Builtin::ToStr},  {"print", Builtin::Print},
  };
  return table;
}

int64_t wrap_add(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
int64_t wrap_sub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
int64_t wrap_mul(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}
int64_t wrap_neg(int64_t a) { return static_cast<int64_t>(-static_cast<uint64_t>(a)); }

struct Local {
  std::string_view name;
  Value value;
};

struct Interp {
  const Program& program;
  const RunOptions& opts;
  std::unordered_map<std::string_view, const FunctionDecl*> functions;

  // one shared locals stack; frames are [frame_base, stack.size())
  std::vector<Local> stack;
  size_t frame_base = 0;

  uint64_t steps = 0;
  int depth = 0;  // program-unit frames
  int current_test = -1;

  explicit Interp(const Program& p, const RunOptions& o) : program(p), opts(o) {
    for (const auto& unit : program.units) {
      if (unit.kind != UnitKind::Program) continue;
      for (const auto& fn : unit.functions) functions.emplace(fn.name, &fn);
    }
  }

  void step() {
    if (++steps > opts.step_limit) throw StepLimitExceeded{};
  }

  void emit(const ExecutionEvent& e) {
    if (opts.sink) opts.sink->on_event(e);
  }

  Value* lookup(std::string_view name) {
    for (size_t i = stack.size(); i > frame_base; --i) {
      if (stack[i - 1].name == name) return &stack[i - 1].value;
    }
    return nullptr;
  }

  [[noreturn]] void runtime_throw(const char* message) {
    throw MiniThrow{Value::of_str(message)};
  }

  Value call_function(const FunctionDecl& fn, std::vector<Value> args) {
    if (depth >= opts.max_call_depth) runtime_throw("call depth exceeded");
    size_t saved_base = frame_base;
    size_t saved_size = stack.size();
    frame_base = stack.size();
    for (size_t i = 0; i < fn.params.size(); ++i) {
      stack.push_back({fn.params[i].name, std::move(args[i])});
    }
    ++depth;
    emit({ExecutionEvent::Kind::FunctionEnter, current_test, false, nullptr, &fn, depth});
    Value ret;
    Flow flow;
    try {
      flow = exec_block(fn.body, &ret);
    } catch (...) {
      --depth;
      frame_base = saved_base;
      stack.resize(saved_size);
      throw;
    }
    emit({ExecutionEvent::Kind::FunctionExit, current_test, false, nullptr, &fn, depth});
    --depth;
    frame_base = saved_base;
    stack.resize(saved_size);
    if (flow != Flow::Return && fn.return_type) runtime_throw("missing return value");
    return ret;
  }

  Flow exec_block(const Statement& block, Value* ret) {
    size_t mark = stack.size();
    for (const auto& child : block.children) {
      Flow flow = exec_statement(child, ret);
      if (flow != Flow::Normal) {
        stack.resize(mark);
        return flow;
      }
    }
    stack.resize(mark);
    return Flow::Normal;
  }

  Flow exec_statement(const Statement& s, Value* ret) {
    step();
    if (s.kind == StmtKind::Block) return exec_block(s, ret);
    if (depth >= 1) {
      emit({ExecutionEvent::Kind::StatementHit, current_test, false, &s, nullptr, depth});
    }
    switch (s.kind) {
      case StmtKind::VarDecl:
        stack.push_back({s.var_name, eval(*s.expr)});
        return Flow::Normal;
      case StmtKind::Assign: {
        Value v = eval(*s.expr);
        *lookup(s.var_name) = std::move(v);
        return Flow::Normal;
      }
      case StmtKind::ExprStmt:
        eval(*s.expr);
        return Flow::Normal;
      case StmtKind::If: {
        if (eval(*s.expr).as_bool()) return exec_block(s.children[0], ret);
        if (s.children.size() > 1) return exec_block(s.children[1], ret);
        return Flow::Normal;
      }
      case StmtKind::While:
        for (;;) {
          step();
          if (!eval(*s.expr).as_bool()) return Flow::Normal;
          Flow flow = exec_block(s.children[0], ret);
          if (flow == Flow::Break) return Flow::Normal;
          if (flow == Flow::Return) return flow;
        }
      case StmtKind::Return:
        if (s.expr) *ret = eval(*s.expr);
        return Flow::Return;
      case StmtKind::Break:
        return Flow::Break;
      case StmtKind::Continue:
        return Flow::Continue;
      case StmtKind::Throw:
        throw MiniThrow{eval(*s.expr)};
      case StmtKind::Try:
        try {
          return exec_block(s.children[0], ret);
        } catch (const MiniThrow&) {
          return exec_block(s.children[1], ret);
        }
      case StmtKind::Assert:
        if (!eval(*s.expr).as_bool()) throw AssertFailed{&s};
        return Flow::Normal;
      case StmtKind::Block:
        return Flow::Normal;  // handled above
    }
    return Flow::Normal;
  }

  Value eval(const Expr& e) {
    step();
    switch (e.kind) {
      case Expr::Kind::IntLit: return Value::of_int(e.int_val);
      case Expr::Kind::BoolLit: return Value::of_bool(e.bool_val);
      case Expr::Kind::StrLit: return Value::of_str(e.text);
      case Expr::Kind::Var: return *lookup(e.text);
      case Expr::Kind::ArrayLit: {
        std::vector<Value> elems;
        elems.reserve(e.args.size());
        for (const auto& arg : e.args) elems.push_back(eval(arg));
        return Value::of_array(std::move(elems));
      }
      case Expr::Kind::Unary: {
        Value v = eval(e.args[0]);
        if (e.op == Expr::Op::Neg) return Value::of_int(wrap_neg(v.i));
        return Value::of_bool(!v.as_bool());
      }
      case Expr::Kind::Binary: return eval_binary(e);
      case Expr::Kind::Index: {
        Value base = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        if (idx.i < 0 || static_cast<uint64_t>(idx.i) >= base.arr->size()) {
          runtime_throw("index out of bounds");
        }
        return (*base.arr)[static_cast<size_t>(idx.i)];
      }
      case Expr::Kind::Call: return eval_call(e);
    }
    runtime_throw("unreachable expression");
  }

  Value eval_binary(const Expr& e) {
    using Op = Expr::Op;
    if (e.op == Op::And) {
      if (!eval(e.args[0]).as_bool()) return Value::of_bool(false);
      return Value::of_bool(eval(e.args[1]).as_bool());
    }
    if (e.op == Op::Or) {
      if (eval(e.args[0]).as_bool()) return Value::of_bool(true);
      return Value::of_bool(eval(e.args[1]).as_bool());
    }
    Value lhs = eval(e.args[0]);
    Value rhs = eval(e.args[1]);
    switch (e.op) {
      case Op::Add:
        if (lhs.tag == TypeExpr::Kind::Str) return Value::of_str(*lhs.str + *rhs.str);
        return Value::of_int(wrap_add(lhs.i, rhs.i));
      case Op::Sub: return Value::of_int(wrap_sub(lhs.i, rhs.i));
      case Op::Mul: return Value::of_int(wrap_mul(lhs.i, rhs.i));
      case Op::Div:
        if (rhs.i == 0) runtime_throw("division by zero");
        if (lhs.i == INT64_MIN && rhs.i == -1) return Value::of_int(INT64_MIN);
        return Value::of_int(lhs.i / rhs.i);
      case Op::Mod:
        if (rhs.i == 0) runtime_throw("division by zero");
        if (lhs.i == INT64_MIN && rhs.i == -1) return Value::of_int(0);
        return Value::of_int(lhs.i % rhs.i);
      case Op::Lt: return Value::of_bool(lhs.i < rhs.i);
      case Op::Le: return Value::of_bool(lhs.i <= rhs.i);
      case Op::Gt: return Value::of_bool(lhs.i > rhs.i);
      case Op::Ge: return Value::of_bool(lhs.i >= rhs.i);
      case Op::Eq: return Value::of_bool(values_equal(lhs, rhs));
      case Op::Ne: return Value::of_bool(!values_equal(lhs, rhs));
      default: runtime_throw("unreachable operator");
    }
  }

  Value eval_call(const Expr& e) {
    auto builtin = builtin_table().find(e.text);
    if (builtin != builtin_table().end()) return eval_builtin(builtin->second, e);
    std::vector<Value> args;
    args.reserve(e.args.size());
    for (const auto& arg : e.args) args.push_back(eval(arg));
    return call_function(*functions.at(e.text), std::move(args));
  }

  Value eval_builtin(Builtin b, const Expr& e) {
    switch (b) {
      case Builtin::Len: {
        Value v = eval(e.args[0]);
        if (v.tag == TypeExpr::Kind::Str) return Value::of_int(static_cast<int64_t>(v.str->size()));
        return Value::of_int(static_cast<int64_t>(v.arr->size()));
      }
      case Builtin::Push: {
        Value a = eval(e.args[0]);
        Value v = eval(e.args[1]);
        a.arr->push_back(std::move(v));
        return Value::of_int(static_cast<int64_t>(a.arr->size()));
      }
      case Builtin::Set: {
        Value a = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        Value v = eval(e.args[2]);
        if (idx.i < 0 || static_cast<uint64_t>(idx.i) >= a.arr->size()) {
          runtime_throw("index out of bounds");
        }
        (*a.arr)[static_cast<size_t>(idx.i)] = v;
        return v;
      }
      case Builtin::Ord: {
        Value s = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        if (idx.i < 0 || static_cast<uint64_t>(idx.i) >= s.str->size()) {
          runtime_throw("index out of bounds");
        }
        return Value::of_int(static_cast<unsigned char>((*s.str)[static_cast<size_t>(idx.i)]));
      }
      case Builtin::Chr: {
        int64_t c = eval(e.args[0]).i;
        char ch = static_cast<char>(static_cast<unsigned char>(((c % 256) + 256) % 256));
        return Value::of_str(std::string(1, ch));
      }
      case Builtin::Substr: {
        Value s = eval(e.args[0]);
        int64_t start = eval(e.args[1]).i;
        int64_t n = eval(e.args[2]).i;
        int64_t size = static_cast<int64_t>(s.str->size());
        if (start < 0 || n < 0 || start > size || n > size - start) {
          runtime_throw("substring out of range");
        }
        return Value::of_str(s.str->substr(static_cast<size_t>(start), static_cast<size_t>(n)));
      }
      case Builtin::ToStr:
        return Value::of_str(std::to_string(eval(e.args[0]).i));
      case Builtin::Print: {
        Value s = eval(e.args[0]);
        if (opts.print_output) {
          *opts.print_output += *s.str;
          *opts.print_output += '\n';
        }
        return Value::of_int(0);  // Void at the type level
      }
    }
    runtime_throw("unreachable builtin");
  }
};

}  // namespace

std::vector<TestResult> run_suite(const Program& program, const RunOptions& options) {
  Interp interp(program, options);
  std::vector<TestResult> results;
  int test_id = 0;
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Test) continue;
    for (const auto& fn : unit.functions) {
      if (!fn.is_test) continue;
      TestResult result;
      result.test_id = test_id;
      result.name = fn.name;
      interp.steps = 0;
      interp.current_test = test_id;
      interp.emit({ExecutionEvent::Kind::TestEnter, test_id, false, nullptr, &fn, 0});
      try {
        Value ret;
        interp.exec_block(fn.body, &ret);
        result.status = TestStatus::Pass;
      } catch (const AssertFailed& a) {
        result.status = TestStatus::Fail;
        result.detail = "assertion failed at " + a.stmt->id.to_string();
      } catch (const MiniThrow& t) {
        result.status = TestStatus::Fail;
        result.detail = "uncaught throw: " + value_display(t.payload);
      } catch (const StepLimitExceeded&) {
        result.status = TestStatus::Timeout;
        result.detail = "exceeded " + std::to_string(options.step_limit) + " steps";
      }
      // recover from any mid-test unwinding
      interp.stack.clear();
      interp.frame_base = 0;
      interp.depth = 0;
      interp.emit({ExecutionEvent::Kind::TestExit, test_id, result.status == TestStatus::Pass,
                   nullptr, &fn, 0});
      bool passed = result.status == TestStatus::Pass;
      results.push_back(std::move(result));
      ++test_id;
      if (options.fail_fast && !passed) return results;
    }
  }
  return results;
}

bool all_passed(const std::vector<TestResult>& results) {
  for (const auto& r : results) {
    if (r.status != TestStatus::Pass) return false;
  }
  return true;
}

int count_tests(const Program& program) {
  int n = 0;
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Test) continue;
    for (const auto& fn : unit.functions) {
      if (fn.is_test) ++n;
    }
  }
  return n;
}

Value evaluate_expression(const Program& program, const Expr& expr,
                          const std::vector<std::pair<std::string, Value>>& bindings,
                          const RunOptions& options) {
  Interp interp(program, options);
  for (const auto& [name, value] : bindings) {
    interp.stack.push_back({name, value});
  }
  try {
    return interp.eval(expr);
  } catch (const MiniThrow& t) {
    throw UncaughtThrow(value_display(t.payload));
  } catch (const StepLimitExceeded&) {
    throw UncaughtThrow("step limit exceeded");
  }
}

}  // namespace sosie
