#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sosie/ast.hpp"

namespace sosie {

// ---------------------------------------------------------------------------
// Runtime values
// ---------------------------------------------------------------------------

struct Value {
  TypeExpr::Kind tag = TypeExpr::Kind::Int;
  int64_t i = 0;  // Int payload, Bool as 0/1
  std::shared_ptr<const std::string> str;
  std::shared_ptr<std::vector<Value>> arr;  // arrays have reference semantics

  static Value of_int(int64_t v) {
    Value x; x.tag = TypeExpr::Kind::Int; x.i = v; return x;
  }
  static Value of_bool(bool v) {
    Value x; x.tag = TypeExpr::Kind::Bool; x.i = v ? 1 : 0; return x;
  }
  static Value of_str(std::string v) {
    Value x; x.tag = TypeExpr::Kind::Str;
    x.str = std::make_shared<const std::string>(std::move(v));
    return x;
  }
  static Value of_array(std::vector<Value> elems) {
    Value x; x.tag = TypeExpr::Kind::Array;
    x.arr = std::make_shared<std::vector<Value>>(std::move(elems));
    return x;
  }

  bool as_bool() const { return i != 0; }
};

bool values_equal(const Value& a, const Value& b);
std::string value_display(const Value& v);

// ---------------------------------------------------------------------------
// Execution events (instrumentation probes)
// ---------------------------------------------------------------------------

struct ExecutionEvent {
  enum class Kind { TestEnter, TestExit, FunctionEnter, FunctionExit, StatementHit };

  Kind kind;
  int test_id = -1;
  bool passed = false;                      // TestExit
  const Statement* statement = nullptr;     // StatementHit
  const FunctionDecl* function = nullptr;   // FunctionEnter / FunctionExit
  // Program-unit frames on the stack at hit time; 1 for a statement in a
  // function called directly from a test.
  int depth = 0;
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void on_event(const ExecutionEvent& event) = 0;
};

// ---------------------------------------------------------------------------
// Suite execution
// ---------------------------------------------------------------------------

enum class TestStatus { Pass, Fail, Timeout };

struct TestResult {
  int test_id = 0;
  std::string name;
  TestStatus status = TestStatus::Pass;
  std::string detail;  // failing assertion id, uncaught-throw message, budget note
};

struct RunOptions {
  uint64_t step_limit = 10'000'000;  // interpreter steps per test
  int max_call_depth = 256;          // program frames; breach throws a catchable error
  EventSink* sink = nullptr;
  bool fail_fast = false;            // stop after the first non-passing test
  std::string* print_output = nullptr;  // print() target; discarded when null
};

// Runs every test function in (unit path, declaration) order. The program
// must typecheck. Runtime errors and failed assertions fail the test; a test
// that exceeds the step budget times out.
std::vector<TestResult> run_suite(const Program& program, const RunOptions& options = {});

bool all_passed(const std::vector<TestResult>& results);
int count_tests(const Program& program);

// ---------------------------------------------------------------------------
// Expression evaluation (test and tooling entry point)
// ---------------------------------------------------------------------------

// A MiniLang throw that escaped to the host.
class UncaughtThrow : public std::runtime_error {
 public:
  explicit UncaughtThrow(const std::string& message) : std::runtime_error(message) {}
};

// Evaluates one typechecked expression against the program's functions with
// the given bindings. Throws UncaughtThrow when the expression throws.
Value evaluate_expression(const Program& program, const Expr& expr,
                          const std::vector<std::pair<std::string, Value>>& bindings = {},
                          const RunOptions& options = {});

}  // namespace sosie
