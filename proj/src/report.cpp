#include "sosie/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "sosie/diag.hpp"
#include "sosie/program_io.hpp"

namespace sosie {

using ordered_json = nlohmann::ordered_json;

const char* taxonomy_category_name(TaxonomyCategory c) {
  switch (c) {
    case TaxonomyCategory::PlasticSpecification: return "plastic_specification";
    case TaxonomyCategory::Optimization: return "optimization";
    case TaxonomyCategory::CodeRedundancy: return "code_redundancy";
    case TaxonomyCategory::ImplementationRedundancy: return "implementation_redundancy";
    case TaxonomyCategory::OptionalFunctionality: return "optional_functionality";
    case TaxonomyCategory::Fooler: return "fooler";
    case TaxonomyCategory::Buggy: return "buggy";
    case TaxonomyCategory::Unclassified: return "unclassified";
  }
  return "?";
}

std::optional<TaxonomyCategory> taxonomy_category_from_name(const std::string& name) {
  static const TaxonomyCategory all[] = {
      TaxonomyCategory::PlasticSpecification,  TaxonomyCategory::Optimization,
      TaxonomyCategory::CodeRedundancy,        TaxonomyCategory::ImplementationRedundancy,
      TaxonomyCategory::OptionalFunctionality, TaxonomyCategory::Fooler,
      TaxonomyCategory::Buggy,                 TaxonomyCategory::Unclassified,
  };
  for (TaxonomyCategory c : all) {
    if (name == taxonomy_category_name(c)) return c;
  }
  return std::nullopt;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double sorted_median(const std::vector<double>& v) {
  size_t n = v.size();
  return (v[(n - 1) / 2] + v[n / 2]) / 2.0;
}

void fill_coverage(const std::vector<ScatterRow>& rows, CoverageSummary& coverage) {
  std::vector<double> tcs;
  for (const auto& row : rows) {
    coverage.total_statements += 1;
    if (row.tc > 0) tcs.push_back(static_cast<double>(row.tc));
  }
  coverage.covered_statements = static_cast<int64_t>(tcs.size());
  if (tcs.empty()) return;
  std::sort(tcs.begin(), tcs.end());
  size_t n = tcs.size();
  coverage.min = tcs.front();
  coverage.max = tcs.back();
  coverage.median = sorted_median(tcs);
  size_t half = n / 2;
  std::vector<double> lower(tcs.begin(), tcs.begin() + half + (n % 2));
  std::vector<double> upper(tcs.begin() + half, tcs.end());
  coverage.q1 = sorted_median(lower);
  coverage.q3 = sorted_median(upper);
}

std::vector<KindRow> kind_rows(const std::vector<TrialRecord>& trials, OpKind op, KindKey key) {
  std::vector<KindRow> rows;
  for (const auto& [kind, bin] : sr_by_kind(trials, op, key)) {
    rows.push_back({kind, bin.n_trials, bin.n_sosies, bin.sr});
  }
  return rows;
}

ordered_json kind_rows_json(const std::vector<KindRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json j;
    j["kind"] = stmt_kind_name(row.kind);
    j["n_trials"] = row.n_trials;
    j["n_sosies"] = row.n_sosies;
    j["sr"] = row.sr ? ordered_json(*row.sr) : ordered_json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json tc_rows_json(const std::vector<SrVsTcRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json j;
    j["tc"] = row.tc;
    j["n_trials"] = row.n_trials;
    j["n_sosies"] = row.n_sosies;
    j["sr"] = row.sr ? ordered_json(*row.sr) : ordered_json(nullptr);
    j["low_confidence"] = row.low_confidence;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string kind_rows_csv(const std::vector<KindRow>& rows) {
  std::string out = "kind,n_trials,n_sosies,sr\n";
  for (const auto& row : rows) {
    out += stmt_kind_name(row.kind);
    out += ',';
    out += std::to_string(row.n_trials);
    out += ',';
    out += std::to_string(row.n_sosies);
    out += ',';
    if (row.sr) out += fmt6(*row.sr);
    out += '\n';
  }
  return out;
}

}  // namespace

AnalysisReport build_report(const std::string& signatures_json_text,
                            const std::string& campaign_json_text,
                            const std::optional<std::string>& labels_json_text,
                            int tc_threshold, int min_trials) {
  AnalysisReport report;
  report.tc_threshold = tc_threshold;

  ordered_json sig;
  try {
    sig = ordered_json::parse(signatures_json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("signatures.json: ") + e.what());
  }
  CampaignFile campaign;
  try {
    campaign = campaign_from_json(campaign_json_text);
  } catch (const IoError& e) {
    throw SchemaError(e.what());
  }

  std::string sig_hash;
  std::set<int> covered_tcs;
  try {
    sig_hash = sig.at("program_hash").get<std::string>();
    report.total_tests = sig.at("total_tests").get<int>();
    for (const auto& row : sig.at("statements")) {
      ScatterRow scatter;
      scatter.id = row.at("id").get<std::string>();
      scatter.tc = row.at("tc").get<int>();
      if (!row.at("median_depth").is_null()) {
        scatter.median_depth = row.at("median_depth").get<double>();
      }
      if (row.contains("mean_depth") && !row.at("mean_depth").is_null()) {
        scatter.mean_depth = row.at("mean_depth").get<double>();
      }
      if (scatter.tc > 0) covered_tcs.insert(scatter.tc);
      report.coverage_scatter.push_back(std::move(scatter));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("signatures.json schema: ") + e.what());
  }

  if (sig_hash != campaign.program_hash) {
    throw HashMismatch("signatures.json is for program " + sig_hash +
                       " but campaign.json is for " + campaign.program_hash);
  }
  report.program_hash = sig_hash;
  fill_coverage(report.coverage_scatter, report.coverage);

  const std::vector<TrialRecord>& trials = campaign.trials;
  report.trial_count = static_cast<int64_t>(trials.size());
  for (const auto& t : trials) report.sosie_count += t.outcome == Outcome::Sosie ? 1 : 0;
  report.sr_global = sosiefication_rate(trials);

  // SR per tc bin, with empty bins for covered-but-untried tc values
  std::map<int, TcBin> bins = sr_by_tc(trials, nullptr, min_trials);
  for (int tc : covered_tcs) {
    if (!bins.count(tc)) {
      TcBin empty;
      empty.low_confidence = true;
      bins.emplace(tc, empty);
    }
  }
  for (const auto& [tc, bin] : bins) {
    SrVsTcRow row{tc, bin.n_trials, bin.n_sosies, bin.sr, bin.low_confidence};
    report.sr_vs_tc.push_back(row);
    if (tc >= 1 && tc <= tc_threshold) report.zoom.push_back(row);
  }

  // regression over confident bins
  std::vector<std::pair<double, double>> trend_points;
  for (const auto& row : report.sr_vs_tc) {
    if (!row.low_confidence && row.sr) {
      trend_points.emplace_back(static_cast<double>(row.tc), *row.sr);
    }
  }
  try {
    TrendLine line = linear_trend(trend_points);
    report.trend.available = true;
    report.trend.slope = line.slope;
    report.trend.intercept = line.intercept;
    report.trend.bins_used = static_cast<int64_t>(trend_points.size());
  } catch (const DegenerateInput& e) {
    report.trend.note = e.what();
  }

  // low-tested vs high-tested proportions at the threshold
  ProportionSection& prop = report.proportion_test;
  for (const auto& t : trials) {
    bool is_sosie = t.outcome == Outcome::Sosie;
    if (t.tc_at_point <= tc_threshold) {
      prop.low_trials += 1;
      prop.low_sosies += is_sosie ? 1 : 0;
    } else {
      prop.high_trials += 1;
      prop.high_sosies += is_sosie ? 1 : 0;
    }
  }
  try {
    ProportionTestResult pt =
        two_proportion_test(prop.low_sosies, prop.low_trials, prop.high_sosies, prop.high_trials);
    prop.available = true;
    prop.statistic = pt.statistic;
    prop.p_value = pt.p_value;
    prop.reject_at_95 = pt.p_value < 0.05;
  } catch (const DegenerateInput&) {
    prop.note = prop.high_trials == 0 ? "insufficient high-tested data"
                                      : "insufficient low-tested data";
  }

  report.delete_by_point = kind_rows(trials, OpKind::Delete, KindKey::PointKind);
  report.add_by_transplant = kind_rows(trials, OpKind::Add, KindKey::TransplantKind);
  report.replace_by_point = kind_rows(trials, OpKind::Replace, KindKey::PointKind);
  report.replace_by_transplant = kind_rows(trials, OpKind::Replace, KindKey::TransplantKind);

  // taxonomy tally over sosie trials
  static const TaxonomyCategory all_categories[] = {
      TaxonomyCategory::PlasticSpecification,  TaxonomyCategory::Optimization,
      TaxonomyCategory::CodeRedundancy,        TaxonomyCategory::ImplementationRedundancy,
      TaxonomyCategory::OptionalFunctionality, TaxonomyCategory::Fooler,
      TaxonomyCategory::Buggy,                 TaxonomyCategory::Unclassified,
  };
  for (TaxonomyCategory c : all_categories) report.taxonomy_tally[taxonomy_category_name(c)] = 0;
  std::set<int64_t> sosie_indices;
  for (const auto& t : trials) {
    if (t.outcome == Outcome::Sosie) sosie_indices.insert(t.trial_index);
  }
  int64_t labeled = 0;
  if (labels_json_text) {
    ordered_json labels;
    try {
      labels = ordered_json::parse(*labels_json_text);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("labels file: ") + e.what());
    }
    if (!labels.is_array()) throw SchemaError("labels file must be a JSON array");
    std::set<int64_t> seen;
    for (const auto& row : labels) {
      int64_t trial_index;
      std::string category;
      try {
        trial_index = row.at("trial_index").get<int64_t>();
        category = row.at("category").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("labels file schema: ") + e.what());
      }
      auto parsed = taxonomy_category_from_name(category);
      if (!parsed) throw SchemaError("unknown taxonomy category: " + category);
      if (!sosie_indices.count(trial_index)) {
        throw SchemaError("label refers to trial " + std::to_string(trial_index) +
                          " which is not a sosie");
      }
      if (!seen.insert(trial_index).second) {
        throw SchemaError("duplicate label for trial " + std::to_string(trial_index));
      }
      report.taxonomy_tally[category] += 1;
      if (*parsed != TaxonomyCategory::Unclassified) labeled += 1;
    }
  }
  report.taxonomy_tally["unclassified"] += report.sosie_count - labeled -
                                           report.taxonomy_tally["unclassified"];
  return report;
}

std::string report_to_json(const AnalysisReport& report) {
  ordered_json root;
  root["program_hash"] = report.program_hash;
  root["tc_threshold"] = report.tc_threshold;
  root["total_tests"] = report.total_tests;
  root["trial_count"] = report.trial_count;
  root["sosie_count"] = report.sosie_count;
  root["sr_global"] = report.sr_global ? ordered_json(*report.sr_global) : ordered_json(nullptr);

  ordered_json coverage;
  coverage["covered_statements"] = report.coverage.covered_statements;
  coverage["total_statements"] = report.coverage.total_statements;
  coverage["tc_min"] = report.coverage.min;
  coverage["tc_q1"] = report.coverage.q1;
  coverage["tc_median"] = report.coverage.median;
  coverage["tc_q3"] = report.coverage.q3;
  coverage["tc_max"] = report.coverage.max;
  root["coverage"] = std::move(coverage);

  ordered_json scatter = ordered_json::array();
  for (const auto& row : report.coverage_scatter) {
    ordered_json j;
    j["id"] = row.id;
    j["tc"] = row.tc;
    j["median_depth"] = row.median_depth ? ordered_json(*row.median_depth) : ordered_json(nullptr);
    j["mean_depth"] = row.mean_depth ? ordered_json(*row.mean_depth) : ordered_json(nullptr);
    scatter.push_back(std::move(j));
  }
  root["coverage_scatter"] = std::move(scatter);

  root["sr_vs_tc"] = tc_rows_json(report.sr_vs_tc);
  root["zoom"] = tc_rows_json(report.zoom);

  ordered_json trend;
  trend["available"] = report.trend.available;
  if (report.trend.available) {
    trend["slope"] = report.trend.slope;
    trend["intercept"] = report.trend.intercept;
    trend["bins_used"] = report.trend.bins_used;
  } else {
    trend["note"] = report.trend.note;
  }
  root["trend"] = std::move(trend);

  ordered_json prop;
  prop["available"] = report.proportion_test.available;
  prop["low"] = {{"sosies", report.proportion_test.low_sosies},
                 {"trials", report.proportion_test.low_trials}};
  prop["high"] = {{"sosies", report.proportion_test.high_sosies},
                  {"trials", report.proportion_test.high_trials}};
  if (report.proportion_test.available) {
    prop["statistic"] = report.proportion_test.statistic;
    prop["p_value"] = report.proportion_test.p_value;
    prop["reject_at_95"] = report.proportion_test.reject_at_95;
  } else {
    prop["note"] = report.proportion_test.note;
  }
  root["proportion_test"] = std::move(prop);

  root["sr_delete_by_point"] = kind_rows_json(report.delete_by_point);
  root["sr_add_by_transplant"] = kind_rows_json(report.add_by_transplant);
  root["sr_replace_by_point"] = kind_rows_json(report.replace_by_point);
  root["sr_replace_by_transplant"] = kind_rows_json(report.replace_by_transplant);

  ordered_json taxonomy;
  for (const auto& [name, count] : report.taxonomy_tally) taxonomy[name] = count;
  root["taxonomy"] = std::move(taxonomy);
  return root.dump(2) + "\n";
}

void export_csv(const AnalysisReport& report, const std::string& out_dir) {
  std::string scatter = "id,tc,median_depth\n";
  for (const auto& row : report.coverage_scatter) {
    scatter += row.id;
    scatter += ',';
    scatter += std::to_string(row.tc);
    scatter += ',';
    if (row.median_depth) scatter += fmt6(*row.median_depth);
    scatter += '\n';
  }
  write_file(out_dir + "/scatter.csv", scatter);

  std::string sr_vs_tc = "tc,n_trials,n_sosies,sr,low_confidence\n";
  for (const auto& row : report.sr_vs_tc) {
    sr_vs_tc += std::to_string(row.tc);
    sr_vs_tc += ',';
    sr_vs_tc += std::to_string(row.n_trials);
    sr_vs_tc += ',';
    sr_vs_tc += std::to_string(row.n_sosies);
    sr_vs_tc += ',';
    if (row.sr) sr_vs_tc += fmt6(*row.sr);
    sr_vs_tc += ',';
    sr_vs_tc += row.low_confidence ? "true" : "false";
    sr_vs_tc += '\n';
  }
  write_file(out_dir + "/sr_vs_tc.csv", sr_vs_tc);

  write_file(out_dir + "/sr_add_by_transplant.csv", kind_rows_csv(report.add_by_transplant));
  write_file(out_dir + "/sr_delete_by_point.csv", kind_rows_csv(report.delete_by_point));
  write_file(out_dir + "/sr_replace_by_point.csv", kind_rows_csv(report.replace_by_point));
  write_file(out_dir + "/sr_replace_by_transplant.csv",
             kind_rows_csv(report.replace_by_transplant));
}

}  // namespace sosie
