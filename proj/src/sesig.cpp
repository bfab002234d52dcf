#include "sosie/sesig.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "json.hpp"
#include "sosie/diag.hpp"
#include "sosie/program_io.hpp"

namespace sosie {

namespace {

using ordered_json = nlohmann::ordered_json;

class SignatureSink : public EventSink {
 public:
  explicit SignatureSink(std::unordered_map<const Statement*, ExecutionSignature*> index)
      : index_(std::move(index)) {}

  void on_event(const ExecutionEvent& event) override {
    if (event.kind != ExecutionEvent::Kind::StatementHit) return;
    ExecutionSignature* sig = index_.at(event.statement);
    sig->covering_tests.insert(event.test_id);
    sig->depth_histogram[event.depth] += 1;
    sig->exec_count += 1;
  }

 private:
  std::unordered_map<const Statement*, ExecutionSignature*> index_;
};

double histogram_quantile_median(const std::vector<double>& sorted) {
  size_t n = sorted.size();
  return (sorted[(n - 1) / 2] + sorted[n / 2]) / 2.0;
}

}  // namespace

SignatureStore collect_signatures(const Program& program, uint64_t step_limit) {
  SignatureStore store;
  store.total_tests = count_tests(program);
  std::unordered_map<const Statement*, ExecutionSignature*> index;
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Program) continue;
    for (const auto& fn : unit.functions) {
      for_each_statement(fn.body, [&](const Statement& s) {
        if (s.is_block()) return;
        ExecutionSignature sig;
        sig.statement = s.id;
        auto [it, _] = store.statements.emplace(s.id.to_string(), std::move(sig));
        index.emplace(&s, &it->second);
      });
    }
  }
  SignatureSink sink(std::move(index));
  RunOptions options;
  options.step_limit = step_limit;
  options.sink = &sink;
  std::vector<TestResult> results = run_suite(program, options);
  for (const auto& r : results) {
    if (r.status != TestStatus::Pass) throw OriginalSuiteFails(r.name, r.detail);
  }
  return store;
}

std::optional<double> median_depth(const ExecutionSignature& sig) {
  if (sig.exec_count == 0) return std::nullopt;
  // walk the histogram twice instead of expanding the multiset
  int64_t n = sig.exec_count;
  int64_t lo_rank = (n - 1) / 2;  // 0-based
  int64_t hi_rank = n / 2;
  std::optional<int> lo, hi;
  int64_t seen = 0;
  for (const auto& [depth, count] : sig.depth_histogram) {
    int64_t next = seen + count;
    if (!lo && lo_rank < next) lo = depth;
    if (!hi && hi_rank < next) hi = depth;
    seen = next;
    if (lo && hi) break;
  }
  return (static_cast<double>(*lo) + static_cast<double>(*hi)) / 2.0;
}

std::optional<double> mean_depth(const ExecutionSignature& sig) {
  if (sig.exec_count == 0) return std::nullopt;
  double total = 0;
  for (const auto& [depth, count] : sig.depth_histogram) {
    total += static_cast<double>(depth) * static_cast<double>(count);
  }
  return total / static_cast<double>(sig.exec_count);
}

CoverageSummary coverage_distribution(const SignatureStore& store, const Program& program) {
  CoverageSummary summary;
  std::vector<double> tcs;
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Program) continue;
    for (const auto& fn : unit.functions) {
      for_each_statement(fn.body, [&](const Statement& s) {
        if (s.is_block()) return;
        const ExecutionSignature* sig = store.find(s.id);
        ScatterRow row;
        row.id = s.id.to_string();
        if (sig) {
          row.tc = sig->tc();
          row.median_depth = median_depth(*sig);
          row.mean_depth = mean_depth(*sig);
          if (sig->covered()) tcs.push_back(static_cast<double>(sig->tc()));
        }
        summary.total_statements += 1;
        summary.scatter.push_back(std::move(row));
      });
    }
  }
  summary.covered_statements = static_cast<int64_t>(tcs.size());
  if (!tcs.empty()) {
    std::sort(tcs.begin(), tcs.end());
    size_t n = tcs.size();
    summary.min = tcs.front();
    summary.max = tcs.back();
    summary.median = histogram_quantile_median(tcs);
    // Tukey hinges: odd counts place the median in both halves
    size_t half = n / 2;
    std::vector<double> lower(tcs.begin(), tcs.begin() + half + (n % 2));
    std::vector<double> upper(tcs.begin() + half, tcs.end());
    summary.q1 = histogram_quantile_median(lower);
    summary.q3 = histogram_quantile_median(upper);
  }
  return summary;
}

std::string signatures_to_json(const SignatureStore& store, const Program& program) {
  ordered_json root;
  root["program_hash"] = program_hash(program);
  root["total_tests"] = store.total_tests;
  ordered_json stmts = ordered_json::array();
  for (const auto& unit : program.units) {
    if (unit.kind != UnitKind::Program) continue;
    for (const auto& fn : unit.functions) {
      for_each_statement(fn.body, [&](const Statement& s) {
        if (s.is_block()) return;
        const ExecutionSignature* sig = store.find(s.id);
        ordered_json row;
        row["id"] = s.id.to_string();
        row["tc"] = sig ? sig->tc() : 0;
        row["exec"] = sig ? sig->exec_count : 0;
        ordered_json hist = ordered_json::object();
        ordered_json tests = ordered_json::array();
        if (sig) {
          for (const auto& [depth, count] : sig->depth_histogram) {
            hist[std::to_string(depth)] = count;
          }
          for (int t : sig->covering_tests) tests.push_back(t);
        }
        row["depth_histogram"] = std::move(hist);
        if (sig && sig->covered()) {
          row["median_depth"] = *median_depth(*sig);
          row["mean_depth"] = *mean_depth(*sig);
        } else {
          row["median_depth"] = nullptr;
          row["mean_depth"] = nullptr;
        }
        row["tests"] = std::move(tests);
        stmts.push_back(std::move(row));
      });
    }
  }
  root["statements"] = std::move(stmts);
  return root.dump(2) + "\n";
}

SignatureStore signatures_from_json(const std::string& text, std::string* hash_out) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid signatures json: ") + e.what());
  }
  SignatureStore store;
  try {
    if (hash_out) *hash_out = root.at("program_hash").get<std::string>();
    store.total_tests = root.at("total_tests").get<int>();
    for (const auto& row : root.at("statements")) {
      ExecutionSignature sig;
      std::string id_text = row.at("id").get<std::string>();
      auto id = StatementId::parse(id_text);
      if (!id) throw IoError("invalid statement id: " + id_text);
      sig.statement = *id;
      sig.exec_count = row.at("exec").get<int64_t>();
      for (const auto& [key, value] : row.at("depth_histogram").items()) {
        sig.depth_histogram[std::stoi(key)] = value.get<int64_t>();
      }
      for (const auto& t : row.at("tests")) sig.covering_tests.insert(t.get<int>());
      store.statements.emplace(id_text, std::move(sig));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("signatures json schema error: ") + e.what());
  }
  return store;
}

std::string scatter_to_csv(const CoverageSummary& summary) {
  std::string out = "id,tc,median_depth\n";
  char buf[64];
  for (const auto& row : summary.scatter) {
    out += row.id;
    out += ',';
    out += std::to_string(row.tc);
    out += ',';
    if (row.median_depth) {
      std::snprintf(buf, sizeof(buf), "%.6f", *row.median_depth);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace sosie
