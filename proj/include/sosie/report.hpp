#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sosie/campaign.hpp"
#include "sosie/sesig.hpp"
#include "sosie/stats.hpp"

namespace sosie {

// Manual classification of one sosie trial (the automated pipeline only
// tallies labels; categorizing is a human task).
enum class TaxonomyCategory {
  PlasticSpecification,
  Optimization,
  CodeRedundancy,
  ImplementationRedundancy,
  OptionalFunctionality,
  Fooler,
  Buggy,
  Unclassified,
};

const char* taxonomy_category_name(TaxonomyCategory c);
std::optional<TaxonomyCategory> taxonomy_category_from_name(const std::string& name);

struct TaxonomyLabel {
  int64_t trial_index = 0;
  TaxonomyCategory category = TaxonomyCategory::Unclassified;
  std::string note;
};

class HashMismatch : public std::runtime_error {
 public:
  explicit HashMismatch(const std::string& message) : std::runtime_error(message) {}
};

class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& message) : std::runtime_error(message) {}
};

struct SrVsTcRow {
  int tc = 0;
  int64_t n_trials = 0;
  int64_t n_sosies = 0;
  std::optional<double> sr;
  bool low_confidence = false;
};

struct KindRow {
  StmtKind kind = StmtKind::ExprStmt;
  int64_t n_trials = 0;
  int64_t n_sosies = 0;
  std::optional<double> sr;
};

struct ProportionSection {
  bool available = false;
  std::string note;  // set when the test degenerates
  int64_t low_sosies = 0, low_trials = 0;
  int64_t high_sosies = 0, high_trials = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject_at_95 = false;
};

struct TrendSection {
  bool available = false;
  std::string note;
  double slope = 0.0;
  double intercept = 0.0;
  int64_t bins_used = 0;
};

struct AnalysisReport {
  std::string program_hash;
  int tc_threshold = 25;
  int total_tests = 0;
  int64_t trial_count = 0;
  int64_t sosie_count = 0;
  std::optional<double> sr_global;
  std::vector<ScatterRow> coverage_scatter;
  CoverageSummary coverage;
  std::vector<SrVsTcRow> sr_vs_tc;
  std::vector<SrVsTcRow> zoom;  // tc in [1, tc_threshold]
  TrendSection trend;           // over confident bins only
  ProportionSection proportion_test;
  std::vector<KindRow> delete_by_point;
  std::vector<KindRow> add_by_transplant;
  std::vector<KindRow> replace_by_point;
  std::vector<KindRow> replace_by_transplant;
  std::map<std::string, int64_t> taxonomy_tally;
};

// Merges signatures.json and campaign.json (which must carry the same
// program hash) plus optional labels into the analysis report.
// Throws HashMismatch or SchemaError.
AnalysisReport build_report(const std::string& signatures_json_text,
                            const std::string& campaign_json_text,
                            const std::optional<std::string>& labels_json_text,
                            int tc_threshold, int min_trials = 30);

std::string report_to_json(const AnalysisReport& report);

// Writes scatter.csv, sr_vs_tc.csv, sr_add_by_transplant.csv,
// sr_delete_by_point.csv, sr_replace_by_point.csv,
// sr_replace_by_transplant.csv. Throws IoError.
void export_csv(const AnalysisReport& report, const std::string& out_dir);

}  // namespace sosie
