#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sosie/sesig.hpp"
#include "sosie/transform.hpp"

namespace sosie {

enum class Outcome { CompileError, TestFailure, Timeout, Sosie };

const char* outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(const std::string& name);

// One consumed-budget transformation attempt.
struct TrialRecord {
  int64_t trial_index = 0;
  TransformationSpec spec;
  int tc_at_point = 0;  // tests covering the transplantation point, always >= 1
  StmtKind point_kind = StmtKind::ExprStmt;
  std::optional<StmtKind> transplant_kind;
  Outcome outcome = Outcome::CompileError;
  std::string failing_test;  // first failing/timed-out test, when applicable
};

struct CampaignConfig {
  int64_t budget = 1;
  uint64_t seed = 0;
  std::vector<OpKind> ops = {OpKind::Add, OpKind::Delete, OpKind::Replace};
  uint64_t step_limit = 10'000'000;
  int workers = 1;  // never serialized: results are worker-count independent
};

struct CampaignResult {
  std::vector<TrialRecord> trials;
  int64_t sosie_count = 0;
  // distinct transplantation points tried over all program statements
  double exploration_rate = 0.0;
  // pretty-printed modified unit per sosie trial, for the sosies/ directory
  std::map<int64_t, std::string> sosie_variants;
};

class NoViableTrials : public std::runtime_error {
 public:
  explicit NoViableTrials(const std::string& message) : std::runtime_error(message) {}
};

class InvalidKey : public std::runtime_error {
 public:
  explicit InvalidKey(const std::string& message) : std::runtime_error(message) {}
};

// Budget-based campaign: per trial, draw a covered statement, an operator,
// and a legal transplant with renaming; validate the variant through
// typecheck and a fail-fast suite run. Deterministic for a fixed
// (seed, budget, ops, step_limit) regardless of worker count.
CampaignResult run_campaign(const Program& program, const SignatureStore& store,
                            const CampaignConfig& config);

// #sosies / #trials; none for an empty trial list.
std::optional<double> sosiefication_rate(const std::vector<TrialRecord>& trials);

struct TcBin {
  int64_t n_trials = 0;
  int64_t n_sosies = 0;
  std::optional<double> sr;
  bool low_confidence = false;
};

// Groups trials by the point's covering-test count. When a store is given,
// tc values that exist in the program but received no trials appear as empty
// bins. Bins under min_trials are flagged rather than removed.
std::map<int, TcBin> sr_by_tc(const std::vector<TrialRecord>& trials,
                              const SignatureStore* store = nullptr, int min_trials = 30);

enum class KindKey { PointKind, TransplantKind };

struct KindBin {
  int64_t n_trials = 0;
  int64_t n_sosies = 0;
  std::optional<double> sr;
};

// SR per statement kind for one operator. Keying delete trials by transplant
// kind is meaningless and throws InvalidKey.
std::map<StmtKind, KindBin> sr_by_kind(const std::vector<TrialRecord>& trials, OpKind op,
                                       KindKey key);

// campaign.json
std::string campaign_to_json(const CampaignResult& result, const CampaignConfig& config,
                             const Program& program);

struct CampaignFile {
  std::string program_hash;
  CampaignConfig config;
  std::vector<TrialRecord> trials;
  int64_t sosie_count = 0;
  double exploration_rate = 0.0;
};

CampaignFile campaign_from_json(const std::string& text);

}  // namespace sosie
