#include "sosie/campaign.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "sosie/diag.hpp"
#include "sosie/pretty.hpp"
#include "sosie/program_io.hpp"
#include "sosie/rng.hpp"

namespace sosie {

using ordered_json = nlohmann::ordered_json;

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::CompileError: return "compile_error";
    case Outcome::TestFailure: return "test_failure";
    case Outcome::Timeout: return "timeout";
    case Outcome::Sosie: return "sosie";
  }
  return "?";
}

std::optional<Outcome> outcome_from_name(const std::string& name) {
  if (name == "compile_error") return Outcome::CompileError;
  if (name == "test_failure") return Outcome::TestFailure;
  if (name == "timeout") return Outcome::Timeout;
  if (name == "sosie") return Outcome::Sosie;
  return std::nullopt;
}

namespace {

constexpr int kRedrawCapPerTrial = 100;

struct CoveredPoint {
  StatementId id;
  int tc = 0;
  StmtKind kind = StmtKind::ExprStmt;
};

struct TrialContext {
  const Program& program;
  const ProgramIndex& idx;
  const ScopeTable& scope;
  const CampaignConfig& config;
  std::vector<CoveredPoint> covered;
};

struct TrialOutput {
  TrialRecord record;
  std::string variant_text;  // set for sosies
  bool exhausted = false;    // redraw cap hit
};

TrialOutput run_one_trial(const TrialContext& ctx, int64_t trial_index) {
  Rng rng = trial_rng(ctx.config.seed, static_cast<uint64_t>(trial_index));
  TrialOutput out;
  TrialRecord& rec = out.record;
  rec.trial_index = trial_index;

  // draw (point, op, transplant); an empty candidate set costs a redraw, not
  // budget
  int redraws = 0;
  std::optional<Candidate> candidate;
  for (;;) {
    const CoveredPoint& point = ctx.covered[rng.below(ctx.covered.size())];
    OpKind op = ctx.config.ops[rng.below(ctx.config.ops.size())];
    rec.spec = TransformationSpec{};
    rec.spec.op = op;
    rec.spec.point = point.id;
    rec.tc_at_point = point.tc;
    rec.point_kind = point.kind;
    rec.transplant_kind.reset();
    if (op == OpKind::Delete) break;
    CandidateSet set = legal_transplants(ctx.program, ctx.idx, ctx.scope, point.id, op);
    if (set.candidates.empty()) {
      if (++redraws > kRedrawCapPerTrial) {
        out.exhausted = true;
        return out;
      }
      continue;
    }
    candidate = set.candidates[rng.below(set.candidates.size())];
    RenamingDraw draw = draw_renaming(ctx.program, ctx.idx, *candidate, point.id, rng);
    rec.spec.transplant = candidate->transplant;
    rec.spec.renaming = std::move(draw.renaming);
    rec.spec.fresh_names = std::move(draw.fresh_names);
    rec.transplant_kind = candidate->transplant_kind;
    break;
  }

  Program variant = apply_transformation(ctx.program, ctx.idx, ctx.scope, rec.spec);
  try {
    typecheck(variant);
  } catch (const TypeError&) {
    rec.outcome = Outcome::CompileError;
    return out;
  }

  RunOptions options;
  options.step_limit = ctx.config.step_limit;
  options.fail_fast = true;
  std::vector<TestResult> results = run_suite(variant, options);
  for (const auto& r : results) {
    if (r.status == TestStatus::Timeout) {
      rec.outcome = Outcome::Timeout;
      rec.failing_test = r.name;
      return out;
    }
    if (r.status == TestStatus::Fail) {
      rec.outcome = Outcome::TestFailure;
      rec.failing_test = r.name;
      return out;
    }
  }
  rec.outcome = Outcome::Sosie;
  for (const auto& unit : variant.units) {
    if (unit.path == rec.spec.point.unit_path) {
      out.variant_text = pretty_print(unit);
      break;
    }
  }
  return out;
}

}  // namespace

CampaignResult run_campaign(const Program& program, const SignatureStore& store,
                            const CampaignConfig& config) {
  if (config.budget < 1) throw NoViableTrials("budget must be at least 1");
  if (config.ops.empty()) throw NoViableTrials("ops must be nonempty");

  ProgramIndex idx = ProgramIndex::build(program);
  ScopeTable scope = typecheck(program);

  TrialContext ctx{program, idx, scope, config, {}};
  for (const auto& [id_text, sig] : store.statements) {
    if (!sig.covered()) continue;
    const Statement* stmt = idx.statements.at(id_text);
    ctx.covered.push_back({sig.statement, sig.tc(), stmt->kind});
  }
  if (ctx.covered.empty()) throw NoViableTrials("no covered statements to transform");

  std::vector<TrialOutput> outputs(static_cast<size_t>(config.budget));
  std::atomic<int64_t> next{0};
  std::atomic<bool> exhausted{false};
  std::exception_ptr worker_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      for (;;) {
        int64_t i = next.fetch_add(1);
        if (i >= config.budget) return;
        outputs[static_cast<size_t>(i)] = run_one_trial(ctx, i);
        if (outputs[static_cast<size_t>(i)].exhausted) exhausted.store(true);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!worker_error) worker_error = std::current_exception();
    }
  };

  int workers = std::max(1, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (worker_error) std::rethrow_exception(worker_error);
  if (exhausted.load()) {
    throw NoViableTrials("redraw cap exhausted: no legal transplant for the drawn points");
  }

  CampaignResult result;
  result.trials.reserve(outputs.size());
  std::set<std::string> points_tried;
  for (auto& out : outputs) {
    points_tried.insert(out.record.spec.point.to_string());
    if (out.record.outcome == Outcome::Sosie) {
      result.sosie_count += 1;
      result.sosie_variants.emplace(out.record.trial_index, std::move(out.variant_text));
    }
    result.trials.push_back(std::move(out.record));
  }
  int64_t total = count_program_statements(program);
  result.exploration_rate =
      total > 0 ? static_cast<double>(points_tried.size()) / static_cast<double>(total) : 0.0;
  return result;
}

std::optional<double> sosiefication_rate(const std::vector<TrialRecord>& trials) {
  if (trials.empty()) return std::nullopt;
  int64_t sosies = 0;
  for (const auto& t : trials) sosies += t.outcome == Outcome::Sosie ? 1 : 0;
  return static_cast<double>(sosies) / static_cast<double>(trials.size());
}

std::map<int, TcBin> sr_by_tc(const std::vector<TrialRecord>& trials,
                              const SignatureStore* store, int min_trials) {
  std::map<int, TcBin> bins;
  if (store) {
    for (const auto& [_, sig] : store->statements) {
      if (sig.covered()) bins[sig.tc()];  // empty bin: no trials, sr none
    }
  }
  for (const auto& t : trials) {
    TcBin& bin = bins[t.tc_at_point];
    bin.n_trials += 1;
    bin.n_sosies += t.outcome == Outcome::Sosie ? 1 : 0;
  }
  for (auto& [_, bin] : bins) {
    if (bin.n_trials > 0) {
      bin.sr = static_cast<double>(bin.n_sosies) / static_cast<double>(bin.n_trials);
    }
    bin.low_confidence = bin.n_trials < min_trials;
  }
  return bins;
}

std::map<StmtKind, KindBin> sr_by_kind(const std::vector<TrialRecord>& trials, OpKind op,
                                       KindKey key) {
  if (key == KindKey::TransplantKind && op == OpKind::Delete) {
    throw InvalidKey("delete trials have no transplant kind");
  }
  std::map<StmtKind, KindBin> bins;
  for (const auto& t : trials) {
    if (t.spec.op != op) continue;
    StmtKind kind;
    if (key == KindKey::PointKind) {
      kind = t.point_kind;
    } else {
      if (!t.transplant_kind) continue;
      kind = *t.transplant_kind;
    }
    KindBin& bin = bins[kind];
    bin.n_trials += 1;
    bin.n_sosies += t.outcome == Outcome::Sosie ? 1 : 0;
  }
  for (auto& [_, bin] : bins) {
    bin.sr = static_cast<double>(bin.n_sosies) / static_cast<double>(bin.n_trials);
  }
  return bins;
}

namespace {

ordered_json spec_json(const TransformationSpec& spec) {
  ordered_json j;
  j["op"] = op_kind_name(spec.op);
  j["point"] = spec.point.to_string();
  j["transplant"] =
      spec.transplant ? ordered_json(spec.transplant->to_string()) : ordered_json(nullptr);
  j["renaming"] = spec.renaming;
  j["fresh"] = spec.fresh_names;
  return j;
}

TransformationSpec spec_from_json(const ordered_json& j) {
  TransformationSpec spec;
  auto op = op_kind_from_name(j.at("op").get<std::string>());
  if (!op) throw IoError("unknown op in spec: " + j.at("op").get<std::string>());
  spec.op = *op;
  auto point = StatementId::parse(j.at("point").get<std::string>());
  if (!point) throw IoError("bad point id in spec");
  spec.point = *point;
  if (!j.at("transplant").is_null()) {
    auto transplant = StatementId::parse(j.at("transplant").get<std::string>());
    if (!transplant) throw IoError("bad transplant id in spec");
    spec.transplant = *transplant;
  }
  for (const auto& [k, v] : j.at("renaming").items()) spec.renaming[k] = v.get<std::string>();
  for (const auto& [k, v] : j.at("fresh").items()) spec.fresh_names[k] = v.get<std::string>();
  return spec;
}

}  // namespace

std::string campaign_to_json(const CampaignResult& result, const CampaignConfig& config,
                             const Program& program) {
  ordered_json root;
  root["program_hash"] = program_hash(program);
  ordered_json cfg;
  cfg["budget"] = config.budget;
  cfg["seed"] = config.seed;
  ordered_json ops = ordered_json::array();
  for (OpKind op : config.ops) ops.push_back(op_kind_name(op));
  cfg["ops"] = std::move(ops);
  cfg["step_limit"] = config.step_limit;
  root["config"] = std::move(cfg);
  ordered_json trials = ordered_json::array();
  for (const auto& t : result.trials) {
    ordered_json row;
    row["trial_index"] = t.trial_index;
    row["spec"] = spec_json(t.spec);
    row["tc_at_point"] = t.tc_at_point;
    row["point_kind"] = stmt_kind_name(t.point_kind);
    row["transplant_kind"] = t.transplant_kind
                                 ? ordered_json(stmt_kind_name(*t.transplant_kind))
                                 : ordered_json(nullptr);
    row["outcome"] = outcome_name(t.outcome);
    row["failing_test"] =
        t.failing_test.empty() ? ordered_json(nullptr) : ordered_json(t.failing_test);
    trials.push_back(std::move(row));
  }
  root["trials"] = std::move(trials);
  root["sosie_count"] = result.sosie_count;
  root["exploration_rate"] = result.exploration_rate;
  return root.dump(2) + "\n";
}

CampaignFile campaign_from_json(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid campaign json: ") + e.what());
  }
  CampaignFile file;
  try {
    file.program_hash = root.at("program_hash").get<std::string>();
    const auto& cfg = root.at("config");
    file.config.budget = cfg.at("budget").get<int64_t>();
    file.config.seed = cfg.at("seed").get<uint64_t>();
    file.config.ops.clear();
    for (const auto& op : cfg.at("ops")) {
      auto parsed = op_kind_from_name(op.get<std::string>());
      if (!parsed) throw IoError("unknown op: " + op.get<std::string>());
      file.config.ops.push_back(*parsed);
    }
    file.config.step_limit = cfg.at("step_limit").get<uint64_t>();
    for (const auto& row : root.at("trials")) {
      TrialRecord t;
      t.trial_index = row.at("trial_index").get<int64_t>();
      t.spec = spec_from_json(row.at("spec"));
      t.tc_at_point = row.at("tc_at_point").get<int>();
      auto pk = stmt_kind_from_name(row.at("point_kind").get<std::string>());
      if (!pk) throw IoError("unknown point kind");
      t.point_kind = *pk;
      if (!row.at("transplant_kind").is_null()) {
        auto tk = stmt_kind_from_name(row.at("transplant_kind").get<std::string>());
        if (!tk) throw IoError("unknown transplant kind");
        t.transplant_kind = *tk;
      }
      auto outcome = outcome_from_name(row.at("outcome").get<std::string>());
      if (!outcome) throw IoError("unknown outcome");
      t.outcome = *outcome;
      if (!row.at("failing_test").is_null()) {
        t.failing_test = row.at("failing_test").get<std::string>();
      }
      file.trials.push_back(std::move(t));
    }
    file.sosie_count = root.at("sosie_count").get<int64_t>();
    file.exploration_rate = root.at("exploration_rate").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("campaign json schema error: ") + e.what());
  }
  return file;
}

}  // namespace sosie
