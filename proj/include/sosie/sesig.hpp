#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosie/ast.hpp"
#include "sosie/interp.hpp"

namespace sosie {

// Per-statement execution signature: which tests cover the statement, and a
// histogram of the call-stack depths at which it executed.
struct ExecutionSignature {
  StatementId statement;
  std::set<int> covering_tests;
  std::map<int, int64_t> depth_histogram;  // depth -> hit count
  int64_t exec_count = 0;

  int tc() const { return static_cast<int>(covering_tests.size()); }
  bool covered() const { return exec_count > 0; }
};

// Signatures for every statement of every program unit. Block nodes are
// containers, never executed, and are excluded; uncovered statements are
// present with an empty signature.
struct SignatureStore {
  std::map<std::string, ExecutionSignature> statements;  // keyed by id string
  int total_tests = 0;

  const ExecutionSignature* find(const StatementId& id) const {
    auto it = statements.find(id.to_string());
    return it == statements.end() ? nullptr : &it->second;
  }
};

// The original suite must be green before any campaign.
class OriginalSuiteFails : public std::runtime_error {
 public:
  OriginalSuiteFails(std::string test_name, const std::string& detail)
      : std::runtime_error("original suite fails: " + test_name +
                           (detail.empty() ? "" : " (" + detail + ")")),
        test_name_(std::move(test_name)) {}
  const std::string& test_name() const { return test_name_; }

 private:
  std::string test_name_;
};

// Runs the full suite once with probes and aggregates the events.
// Throws OriginalSuiteFails when any test does not pass.
SignatureStore collect_signatures(const Program& program, uint64_t step_limit = 10'000'000);

// Median over the multiset encoded by the histogram; the two middle values
// are averaged for even sizes. Empty signatures have no median.
std::optional<double> median_depth(const ExecutionSignature& sig);
std::optional<double> mean_depth(const ExecutionSignature& sig);

struct ScatterRow {
  std::string id;
  int tc = 0;
  std::optional<double> median_depth;
  std::optional<double> mean_depth;
};

struct CoverageSummary {
  // five-number summary of |covering_tests| over covered statements
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  int64_t covered_statements = 0;
  int64_t total_statements = 0;
  std::vector<ScatterRow> scatter;  // one row per statement, program order
};

// Quartiles use Tukey hinges: for odd counts the median belongs to both
// halves. Scatter rows follow unit/declaration order.
CoverageSummary coverage_distribution(const SignatureStore& store, const Program& program);

// signatures.json
std::string signatures_to_json(const SignatureStore& store, const Program& program);
SignatureStore signatures_from_json(const std::string& text, std::string* hash_out = nullptr);
std::string scatter_to_csv(const CoverageSummary& summary);

}  // namespace sosie
