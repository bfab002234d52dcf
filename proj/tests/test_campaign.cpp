#include "doctest.h"

#include <algorithm>

#include "sosie/campaign.hpp"
#include "sosie/diag.hpp"
#include "sosie/program_io.hpp"
#include "sosie/typecheck.hpp"
#include "support.hpp"

using namespace sosie;
using test::make_program;

namespace {

TrialRecord trial(int64_t index, OpKind op, int tc, StmtKind point_kind, Outcome outcome,
                  std::optional<StmtKind> transplant_kind = std::nullopt) {
  TrialRecord t;
  t.trial_index = index;
  t.spec.op = op;
  t.tc_at_point = tc;
  t.point_kind = point_kind;
  t.transplant_kind = transplant_kind;
  t.outcome = outcome;
  return t;
}

Program hashmap() { return load_program(test::fixture_path("corpus/hashmap")); }

}  // namespace

TEST_SUITE("campaign") {

TEST_CASE("a delete on a plastic statement yields a sosie") {
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  // force the draw onto the mixing statement of hash: budget 1, delete only,
  // seeds explored until that point comes up, as the sampler is uniform
  StatementId mixing{"src/hashmap.mini", "hash", {2, 0, 0}};
  REQUIRE(store.find(mixing) != nullptr);
  REQUIRE(store.find(mixing)->covered());
  CampaignConfig config;
  config.budget = 1;
  config.ops = {OpKind::Delete};
  config.step_limit = 200'000;
  bool seen = false;
  for (uint64_t seed = 0; seed < 200 && !seen; ++seed) {
    config.seed = seed;
    CampaignResult result = run_campaign(p, store, config);
    REQUIRE(result.trials.size() == 1);
    if (result.trials[0].spec.point == mixing) {
      seen = true;
      CHECK(result.trials[0].outcome == Outcome::Sosie);
      CHECK(result.sosie_count == 1);
      CHECK(result.sosie_variants.count(0) == 1);
    }
  }
  CHECK(seen);
}

TEST_CASE("deleting the only asserted return is a test failure") {
  Program p = make_program({"fn seven() -> Int { return 7; }"},
                           {"fn test_seven() { assert seven() == 7; }"});
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 1;
  config.ops = {OpKind::Delete};
  CampaignResult result = run_campaign(p, store, config);
  REQUIRE(result.trials.size() == 1);
  // deleting the lone return fails the missing-return check instead
  CHECK(result.trials[0].outcome == Outcome::CompileError);

  Program p2 = make_program({"fn pick(c: Bool) -> Int { if c { return 1; } return 2; }"},
                            {"fn test_pick() { assert pick(true) == 1; }"});
  typecheck(p2);
  SignatureStore store2 = collect_signatures(p2);
  bool failure_seen = false;
  for (uint64_t seed = 0; seed < 50 && !failure_seen; ++seed) {
    CampaignConfig c2;
    c2.budget = 1;
    c2.seed = seed;
    c2.ops = {OpKind::Delete};
    CampaignResult r2 = run_campaign(p2, store2, c2);
    if (r2.trials[0].spec.point.path == std::vector<int32_t>{0, 0, 0}) {
      // deleted the then-branch return: pick(true) now returns 2
      failure_seen = true;
      CHECK(r2.trials[0].outcome == Outcome::TestFailure);
      CHECK(r2.trials[0].failing_test == "test_pick");
    }
  }
  CHECK(failure_seen);
}

TEST_CASE("worker counts do not change campaign.json bytes") {
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 120;
  config.seed = 9;
  config.step_limit = 200'000;
  std::string baseline;
  for (int workers : {1, 4, 8}) {
    config.workers = workers;
    CampaignResult result = run_campaign(p, store, config);
    std::string text = campaign_to_json(result, config, p);
    if (baseline.empty()) {
      baseline = text;
    } else {
      CHECK(text == baseline);
    }
  }
}

TEST_CASE("every trial lands on a covered point") {
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 300;
  config.seed = 3;
  config.step_limit = 200'000;
  CampaignResult result = run_campaign(p, store, config);
  REQUIRE(result.trials.size() == 300);
  ProgramIndex idx = ProgramIndex::build(p);
  for (const auto& t : result.trials) {
    CHECK(t.tc_at_point >= 1);
    const ExecutionSignature* sig = store.find(t.spec.point);
    REQUIRE(sig != nullptr);
    CHECK(sig->tc() == t.tc_at_point);
    CHECK(idx.find(t.spec.point)->kind == t.point_kind);
    if (t.spec.op == OpKind::Delete) {
      CHECK_FALSE(t.spec.transplant.has_value());
      CHECK_FALSE(t.transplant_kind.has_value());
    } else {
      REQUIRE(t.spec.transplant.has_value());
      CHECK(idx.find(*t.spec.transplant)->kind == *t.transplant_kind);
    }
  }
  CHECK(result.sosie_count ==
        std::count_if(result.trials.begin(), result.trials.end(),
                      [](const TrialRecord& t) { return t.outcome == Outcome::Sosie; }));
  CHECK(result.exploration_rate > 0.0);
  CHECK(result.exploration_rate <= 1.0);
}

TEST_CASE("sosie trials re-verify on the pristine program") {
  Program p = hashmap();
  ScopeTable scope = typecheck(p);
  ProgramIndex idx = ProgramIndex::build(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 150;
  config.seed = 21;
  config.step_limit = 200'000;
  CampaignResult result = run_campaign(p, store, config);
  int verified = 0;
  for (const auto& t : result.trials) {
    if (t.outcome != Outcome::Sosie) continue;
    Program variant = apply_transformation(p, idx, scope, t.spec);
    typecheck(variant);
    RunOptions options;
    options.step_limit = config.step_limit;
    CHECK(all_passed(run_suite(variant, options)));
    ++verified;
  }
  CHECK(verified > 0);
}

TEST_CASE("campaign json round-trips") {
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 60;
  config.seed = 4;
  config.step_limit = 200'000;
  config.ops = {OpKind::Add, OpKind::Delete};
  CampaignResult result = run_campaign(p, store, config);
  std::string text = campaign_to_json(result, config, p);
  CampaignFile file = campaign_from_json(text);
  CHECK(file.program_hash == program_hash(p));
  CHECK(file.config.budget == config.budget);
  CHECK(file.config.seed == config.seed);
  CHECK(file.config.ops == config.ops);
  CHECK(file.sosie_count == result.sosie_count);
  REQUIRE(file.trials.size() == result.trials.size());
  for (size_t i = 0; i < file.trials.size(); ++i) {
    CHECK(file.trials[i].spec.op == result.trials[i].spec.op);
    CHECK(file.trials[i].spec.point == result.trials[i].spec.point);
    CHECK(file.trials[i].spec.renaming == result.trials[i].spec.renaming);
    CHECK(file.trials[i].outcome == result.trials[i].outcome);
  }
}

TEST_CASE("timeouts are recorded when a variant spins") {
  // adding the decrement's inverse can make the loop diverge; instead make a
  // program where deleting the decrement spins the loop
  Program p = make_program(
      {"fn countdown(n: Int) -> Int {\n"
       "  while n > 0 {\n"
       "    n = n - 1;\n"
       "  }\n"
       "  return n;\n"
       "}"},
      {"fn test_countdown() { assert countdown(3) == 0; }"});
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  bool timeout_seen = false;
  for (uint64_t seed = 0; seed < 40 && !timeout_seen; ++seed) {
    CampaignConfig config;
    config.budget = 1;
    config.seed = seed;
    config.ops = {OpKind::Delete};
    config.step_limit = 5'000;
    CampaignResult result = run_campaign(p, store, config);
    if (result.trials[0].spec.point.path == std::vector<int32_t>{0, 0, 0}) {
      timeout_seen = true;
      CHECK(result.trials[0].outcome == Outcome::Timeout);
      CHECK(result.trials[0].failing_test == "test_countdown");
    }
  }
  CHECK(timeout_seen);
}

TEST_CASE("campaign rejects a degenerate setup") {
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 0;
  CHECK_THROWS_AS(run_campaign(p, store, config), NoViableTrials);
  config.budget = 1;
  config.ops = {};
  CHECK_THROWS_AS(run_campaign(p, store, config), NoViableTrials);

  // a store with no covered statements cannot seed any trial
  SignatureStore empty;
  empty.total_tests = 0;
  config.ops = {OpKind::Delete};
  CHECK_THROWS_AS(run_campaign(p, empty, config), NoViableTrials);
}

TEST_CASE("sosiefication_rate follows the definition") {
  std::vector<TrialRecord> trials;
  CHECK_FALSE(sosiefication_rate(trials).has_value());
  for (int i = 0; i < 10; ++i) {
    trials.push_back(trial(i, OpKind::Delete, 1, StmtKind::Assign, Outcome::TestFailure));
  }
  CHECK(*sosiefication_rate(trials) == doctest::Approx(0.0));
  // the paper's commons-io numbers: 1644 sosies over 10959 trials is 15%
  trials.clear();
  for (int i = 0; i < 10959; ++i) {
    trials.push_back(trial(i, OpKind::Delete, 1, StmtKind::Assign,
                           i < 1644 ? Outcome::Sosie : Outcome::TestFailure));
  }
  CHECK(*sosiefication_rate(trials) == doctest::Approx(0.150).epsilon(0.001));
}

TEST_CASE("sr_by_tc groups, flags low confidence, and keeps empty bins") {
  std::vector<TrialRecord> trials;
  // 40 trials at tc=1 (20 sosies), 1 trial at tc=372 (sosie)
  for (int i = 0; i < 40; ++i) {
    trials.push_back(trial(i, OpKind::Delete, 1, StmtKind::Assign,
                           i % 2 == 0 ? Outcome::Sosie : Outcome::TestFailure));
  }
  trials.push_back(trial(40, OpKind::Add, 372, StmtKind::Return, Outcome::Sosie,
                         StmtKind::Assign));
  auto bins = sr_by_tc(trials, nullptr, 30);
  REQUIRE(bins.count(1) == 1);
  CHECK(bins[1].n_trials == 40);
  CHECK(*bins[1].sr == doctest::Approx(0.5));
  CHECK_FALSE(bins[1].low_confidence);
  // the single-trial outlier: SR 1.0 but flagged
  REQUIRE(bins.count(372) == 1);
  CHECK(*bins[372].sr == doctest::Approx(1.0));
  CHECK(bins[372].low_confidence);
  CHECK(bins.count(131) == 0);

  // hand-built 6-trial list
  std::vector<TrialRecord> six;
  six.push_back(trial(0, OpKind::Delete, 2, StmtKind::Assign, Outcome::Sosie));
  six.push_back(trial(1, OpKind::Delete, 2, StmtKind::Assign, Outcome::TestFailure));
  six.push_back(trial(2, OpKind::Delete, 2, StmtKind::Assign, Outcome::CompileError));
  six.push_back(trial(3, OpKind::Delete, 5, StmtKind::Return, Outcome::Sosie));
  six.push_back(trial(4, OpKind::Delete, 5, StmtKind::Return, Outcome::Sosie));
  six.push_back(trial(5, OpKind::Delete, 9, StmtKind::If, Outcome::Timeout));
  auto hand = sr_by_tc(six, nullptr, 30);
  CHECK(hand.size() == 3);
  CHECK(hand[2].n_trials == 3);
  CHECK(*hand[2].sr == doctest::Approx(1.0 / 3.0));
  CHECK(hand[5].n_trials == 2);
  CHECK(*hand[5].sr == doctest::Approx(1.0));
  CHECK(hand[9].n_trials == 1);
  CHECK(*hand[9].sr == doctest::Approx(0.0));

  // with a store, covered-but-untried tc values appear as empty bins
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  auto with_store = sr_by_tc({}, &store, 30);
  CHECK(with_store.size() > 0);
  for (const auto& [tc, bin] : with_store) {
    CHECK(bin.n_trials == 0);
    CHECK_FALSE(bin.sr.has_value());
  }
}

TEST_CASE("sr_by_kind keys by point or transplant kind") {
  std::vector<TrialRecord> trials;
  trials.push_back(trial(0, OpKind::Delete, 1, StmtKind::Continue, Outcome::Sosie));
  trials.push_back(trial(1, OpKind::Delete, 1, StmtKind::Continue, Outcome::Sosie));
  trials.push_back(trial(2, OpKind::Delete, 1, StmtKind::Return, Outcome::TestFailure));
  trials.push_back(trial(3, OpKind::Add, 1, StmtKind::Assign, Outcome::Sosie, StmtKind::Assign));
  trials.push_back(trial(4, OpKind::Add, 1, StmtKind::Assign, Outcome::TestFailure,
                         StmtKind::Return));

  auto by_point = sr_by_kind(trials, OpKind::Delete, KindKey::PointKind);
  CHECK(*by_point[StmtKind::Continue].sr == doctest::Approx(1.0));
  CHECK(*by_point[StmtKind::Return].sr == doctest::Approx(0.0));
  CHECK(by_point.count(StmtKind::Assign) == 0);

  auto by_transplant = sr_by_kind(trials, OpKind::Add, KindKey::TransplantKind);
  CHECK(*by_transplant[StmtKind::Assign].sr == doctest::Approx(1.0));
  CHECK(*by_transplant[StmtKind::Return].sr == doctest::Approx(0.0));

  CHECK_THROWS_AS(sr_by_kind(trials, OpKind::Delete, KindKey::TransplantKind), InvalidKey);
}

TEST_CASE("count conservation across groupings") {
  Program p = hashmap();
  typecheck(p);
  SignatureStore store = collect_signatures(p);
  CampaignConfig config;
  config.budget = 200;
  config.seed = 13;
  config.step_limit = 200'000;
  CampaignResult result = run_campaign(p, store, config);

  int64_t tc_total = 0;
  for (const auto& [_, bin] : sr_by_tc(result.trials, &store, 30)) tc_total += bin.n_trials;
  CHECK(tc_total == static_cast<int64_t>(result.trials.size()));

  for (OpKind op : {OpKind::Add, OpKind::Delete, OpKind::Replace}) {
    int64_t op_trials = 0;
    for (const auto& t : result.trials) op_trials += t.spec.op == op ? 1 : 0;
    int64_t group_total = 0;
    for (const auto& [_, bin] : sr_by_kind(result.trials, op, KindKey::PointKind)) {
      group_total += bin.n_trials;
    }
    CHECK(group_total == op_trials);
  }

  for (const auto& [_, bin] : sr_by_tc(result.trials, &store, 30)) {
    if (bin.sr) {
      CHECK(*bin.sr >= 0.0);
      CHECK(*bin.sr <= 1.0);
    }
  }
}

}  // TEST_SUITE
