#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sosie/campaign.hpp"
#include "sosie/diag.hpp"
#include "sosie/program_io.hpp"
#include "sosie/report.hpp"
#include "sosie/sesig.hpp"
#include "sosie/typecheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitSuiteFails = 3;

sosie::Program load_checked(const std::string& dir) {
  sosie::Program program = sosie::load_program(dir);
  sosie::typecheck(program);
  return program;
}

int cmd_check(const std::string& dir) {
  sosie::Program program = load_checked(dir);
  int64_t statements = sosie::count_program_statements(program);
  std::printf("ok: %zu unit(s), %lld statement(s), %d test(s)\n", program.units.size(),
              static_cast<long long>(statements), sosie::count_tests(program));
  return kExitOk;
}

int cmd_test(const std::string& dir, uint64_t step_limit) {
  sosie::Program program = load_checked(dir);
  sosie::RunOptions options;
  options.step_limit = step_limit;
  auto results = sosie::run_suite(program, options);
  int failed = 0;
  for (const auto& r : results) {
    const char* status = r.status == sosie::TestStatus::Pass      ? "PASS"
                         : r.status == sosie::TestStatus::Timeout ? "TIMEOUT"
                                                                  : "FAIL";
    if (r.status != sosie::TestStatus::Pass) ++failed;
    std::printf("%-7s %s%s%s\n", status, r.name.c_str(), r.detail.empty() ? "" : " — ",
                r.detail.c_str());
  }
  std::printf("%zu test(s), %d failure(s)\n", results.size(), failed);
  return failed == 0 ? kExitOk : kExitSuiteFails;
}

int cmd_sesig(const std::string& dir, const std::string& out, const std::string& scatter_out,
              uint64_t step_limit) {
  sosie::Program program = load_checked(dir);
  sosie::SignatureStore store = sosie::collect_signatures(program, step_limit);
  sosie::write_file(out, sosie::signatures_to_json(store, program));
  std::printf("wrote %s (%zu statements, %d tests)\n", out.c_str(), store.statements.size(),
              store.total_tests);
  if (!scatter_out.empty()) {
    sosie::CoverageSummary summary = sosie::coverage_distribution(store, program);
    sosie::write_file(scatter_out, sosie::scatter_to_csv(summary));
    std::printf("wrote %s\n", scatter_out.c_str());
  }
  return kExitOk;
}

int cmd_sosiefy(const std::string& dir, const std::string& signatures_path,
                const sosie::CampaignConfig& config, const std::string& out,
                const std::string& sosie_dir) {
  sosie::Program program = load_checked(dir);
  std::string hash;
  sosie::SignatureStore store =
      sosie::signatures_from_json(sosie::read_file(signatures_path), &hash);
  if (hash != sosie::program_hash(program)) {
    std::fprintf(stderr, "error: %s was collected for a different program version\n",
                 signatures_path.c_str());
    return kExitInput;
  }
  sosie::CampaignResult result = sosie::run_campaign(program, store, config);
  sosie::write_file(out, sosie::campaign_to_json(result, config, program));
  std::printf("wrote %s: %lld trial(s), %lld sosie(s), exploration %.3f\n", out.c_str(),
              static_cast<long long>(result.trials.size()),
              static_cast<long long>(result.sosie_count), result.exploration_rate);
  if (!sosie_dir.empty()) {
    for (const auto& [index, text] : result.sosie_variants) {
      sosie::write_file(sosie_dir + "/" + std::to_string(index) + ".mini", text);
    }
    std::printf("wrote %zu variant file(s) under %s\n", result.sosie_variants.size(),
                sosie_dir.c_str());
  }
  return kExitOk;
}

int cmd_report(const std::string& signatures_path, const std::string& campaign_path,
               const std::string& labels_path, int tc_threshold, const std::string& out,
               const std::string& csv_dir) {
  std::optional<std::string> labels;
  if (!labels_path.empty()) labels = sosie::read_file(labels_path);
  sosie::AnalysisReport report =
      sosie::build_report(sosie::read_file(signatures_path), sosie::read_file(campaign_path),
                          labels, tc_threshold);
  sosie::write_file(out, sosie::report_to_json(report));
  std::printf("wrote %s\n", out.c_str());
  if (!csv_dir.empty()) {
    sosie::export_csv(report, csv_dir);
    std::printf("wrote CSV tables under %s\n", csv_dir.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sosieforge — test-suite-driven program diversification for MiniLang"};
  app.require_subcommand(1);

  std::string dir;
  uint64_t step_limit = 10'000'000;

  auto* check = app.add_subcommand("check", "parse and typecheck a program directory");
  check->add_option("dir", dir, "program directory")->required();

  auto* test = app.add_subcommand("test", "run the program's test suite");
  test->add_option("dir", dir, "program directory")->required();
  test->add_option("--step-limit", step_limit, "interpreter steps per test");

  std::string sig_out = "signatures.json";
  std::string scatter_out;
  auto* sesig = app.add_subcommand("sesig", "collect per-statement execution signatures");
  sesig->add_option("dir", dir, "program directory")->required();
  sesig->add_option("--out", sig_out, "signatures output file");
  sesig->add_option("--scatter", scatter_out, "also write the scatter CSV here");
  sesig->add_option("--step-limit", step_limit, "interpreter steps per test");

  std::string signatures_path;
  std::string campaign_out = "campaign.json";
  std::string sosie_dir;
  std::string ops_text = "add,delete,replace";
  sosie::CampaignConfig config;
  auto* sosiefy = app.add_subcommand("sosiefy", "run a budget-based sosie synthesis campaign");
  sosiefy->add_option("dir", dir, "program directory")->required();
  sosiefy->add_option("--signatures", signatures_path, "signatures.json for this program")
      ->required();
  sosiefy->add_option("--budget", config.budget, "number of trials")->required();
  sosiefy->add_option("--seed", config.seed, "rng seed");
  sosiefy->add_option("--ops", ops_text, "comma-separated subset of add,delete,replace");
  sosiefy->add_option("--workers", config.workers, "parallel workers");
  sosiefy->add_option("--step-limit", config.step_limit, "interpreter steps per test");
  sosiefy->add_option("--out", campaign_out, "campaign output file");
  sosiefy->add_option("--sosie-dir", sosie_dir, "directory for pretty-printed sosie variants");

  std::string campaign_path;
  std::string labels_path;
  std::string report_out = "report.json";
  std::string csv_dir;
  int tc_threshold = 25;
  auto* report = app.add_subcommand("report", "merge signatures and campaign into the analysis");
  report->add_option("--signatures", signatures_path, "signatures.json")->required();
  report->add_option("--campaign", campaign_path, "campaign.json")->required();
  report->add_option("--labels", labels_path, "manual taxonomy labels (JSON array)");
  report->add_option("--tc-threshold", tc_threshold, "low/high tested split");
  report->add_option("--out", report_out, "report output file");
  report->add_option("--csv", csv_dir, "directory for CSV tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(dir);
    if (test->parsed()) return cmd_test(dir, step_limit);
    if (sesig->parsed()) return cmd_sesig(dir, sig_out, scatter_out, step_limit);
    if (sosiefy->parsed()) {
      config.ops.clear();
      size_t start = 0;
      while (start <= ops_text.size()) {
        size_t comma = ops_text.find(',', start);
        std::string part = ops_text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!part.empty()) {
          auto op = sosie::op_kind_from_name(part);
          if (!op) {
            std::fprintf(stderr, "error: unknown op '%s'\n", part.c_str());
            return kExitUsage;
          }
          config.ops.push_back(*op);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (config.ops.empty()) {
        std::fprintf(stderr, "error: --ops must name at least one operator\n");
        return kExitUsage;
      }
      return cmd_sosiefy(dir, signatures_path, config, campaign_out, sosie_dir);
    }
    if (report->parsed()) {
      return cmd_report(signatures_path, campaign_path, labels_path, tc_threshold, report_out,
                        csv_dir);
    }
  } catch (const sosie::OriginalSuiteFails& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSuiteFails;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitUsage;
}
