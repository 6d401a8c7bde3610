// Copyright 2026 The seminv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Acceptance suite: one test case per criterion, each printing a PASS line
// when its checks hold. Everything here runs offline with the deterministic
// local embedding provider and mock agents.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "seminv/analysis.hpp"
#include "seminv/runner.hpp"
#include "seminv/text.hpp"

using namespace seminv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, const std::string& what) {
  std::printf("[acceptance] criterion %d (%s): PASS\n", criterion, what.c_str());
  std::fflush(stdout);
}

std::string shipped_corpus_path() {
  return std::string(SEMINV_SOURCE_DIR) + "/data/corpus.json";
}

struct TestDir {
  fs::path path;
  explicit TestDir(const std::string& name) : path(fs::path("acceptance_out") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  std::string str(const std::string& file = "") const {
    return file.empty() ? path.string() : (path / file).string();
  }
};

CampaignConfig perfect_agent_config(const TestDir& dir, const std::string& out_subdir) {
  Corpus full = load_corpus(shipped_corpus_path());
  Corpus small;
  small.schema_version = full.schema_version;
  small.problems.assign(full.problems.begin(), full.problems.begin() + 5);

  CampaignConfig cfg;
  cfg.corpus_path = dir.str("corpus5.json");
  if (!fs::exists(cfg.corpus_path)) save_corpus(small, cfg.corpus_path);
  cfg.output_dir = dir.str(out_subdir);
  for (std::string id : {"echo-a", "echo-b"}) {
    AgentConfig m;
    m.model_id = id;
    m.endpoint_url = "mock:reference-echo";
    cfg.models.push_back(m);
  }
  cfg.relations = all_relations();
  cfg.transform_source = TransformSource::generate_llm;
  AgentConfig gen;
  gen.model_id = "mock-transformer";
  gen.endpoint_url = "mock:transform";
  cfg.generator = gen;
  cfg.seed = 7;
  cfg.max_in_flight = 4;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string random_statement(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "the", "a",    "speed",  "mass",   "tank",  "fills", "drains", "grows",
      "car", "cell", "moves",  "costs",  "rate",  "count", "sample", "test",
      "of",  "with", "every",  "per",    "hour",  "meter", "dollar", "trial"};
  std::uniform_int_distribution<int> n_sentences(1, 5);
  std::uniform_int_distribution<int> n_words(3, 8);
  std::uniform_int_distribution<int> word_index(0, static_cast<int>(words.size()) - 1);
  std::uniform_int_distribution<int> number(0, 999);
  std::uniform_int_distribution<int> punct(0, 2);

  std::string statement;
  int sentences = n_sentences(rng);
  for (int s = 0; s < sentences; ++s) {
    if (s > 0) statement += " ";
    int count = n_words(rng);
    for (int w = 0; w < count; ++w) {
      if (w > 0) statement += " ";
      if (rng() % 4 == 0) {
        statement += std::to_string(number(rng));
        if (rng() % 3 == 0) statement += "." + std::to_string(number(rng) % 100);
      } else {
        statement += words[word_index(rng)];
      }
    }
    statement += (punct(rng) == 0 ? "?" : punct(rng) == 1 ? "!" : ".");
  }
  return statement;
}

}  // namespace

TEST_CASE("criterion 1: metric oracle suite reproduces the derived examples") {
  auto start = Clock::now();
  HashedBagProvider provider(384);

  // cosine
  EmbeddingVector ua{{1, 1}, "t"}, ub{{1, 0}, "t"}, uc{{0, 1}, "t"};
  REQUIRE(cosine(ua, ua) == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(cosine(ub, uc) == doctest::Approx(0.0).epsilon(1e-6));
  REQUIRE(cosine(ua, ub) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

  // score deltas
  REQUIRE(score_delta(0.8, 0.8) == doctest::Approx(0.0).epsilon(1e-6));
  REQUIRE(score_delta(0.6, 0.8) == doctest::Approx(-0.2).epsilon(1e-6));
  REQUIRE(score_delta(0.9, 0.7) == doctest::Approx(0.2).epsilon(1e-6));

  // MAD and stability over hand-built records
  auto with_delta = [](const std::string& relation, double d) {
    return make_evaluation_record("m", "p", relation, 0.8 + d, 0.8, 0, 0);
  };
  std::vector<EvaluationRecord> records = {
      with_delta("paraphrase", 0.1), with_delta("expand", -0.1), with_delta("contract", 0.2),
      with_delta("contrastive", 0.0)};
  REQUIRE(mad(records) == doctest::Approx(0.1).epsilon(1e-6));
  REQUIRE(mad({with_delta("expand", 0.0)}) == doctest::Approx(0.0).epsilon(1e-6));
  REQUIRE(mad({with_delta("contrastive", -0.3)}) == doctest::Approx(0.3).epsilon(1e-6));

  std::vector<EvaluationRecord> stability_records = {
      with_delta("paraphrase", 0.04), with_delta("expand", -0.06), with_delta("identity", 0.0)};
  REQUIRE(stability_rate(stability_records) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  REQUIRE(stability_rate({with_delta("identity", 0.0)}) == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(stability_rate({with_delta("expand", 0.05)}) == doctest::Approx(0.0).epsilon(1e-6));

  // step scores: exact-match max semantics and the 0.5/0.9 -> 0.7 average
  const std::string nine = "alpha beta gamma delta epsilon zeta eta theta iota";
  StepScores s = step_scores({"alpha beta", nine + " kappa"},
                             {"alpha gamma", nine + " mu"}, provider);
  REQUIRE(s.per_step[0] == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(s.per_step[1] == doctest::Approx(0.9).epsilon(1e-6));
  REQUIRE(s.average == doctest::Approx(0.7).epsilon(1e-6));
  StepScores exact = step_scores({"delta epsilon zeta"},
                                 {"alpha beta", "delta epsilon zeta", "eta theta"}, provider);
  REQUIRE(exact.per_step[0] == doctest::Approx(1.0).epsilon(1e-6));

  double elapsed = seconds_since(start);
  REQUIRE(elapsed < 1.0);
  report(1, "metric oracles, " + std::to_string(elapsed) + "s");
}

TEST_CASE("criterion 2: statistics exactness") {
  auto start = Clock::now();

  TestResult mw = mann_whitney_u({1, 2, 3}, {4, 5, 6});
  REQUIRE(mw.method == TestMethod::exact);
  REQUIRE(mw.statistic == 0.0);
  REQUIRE(mw.p_value == 0.1);

  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<double> used;
    std::vector<double> a, b;
    while (a.size() < 8) {
      double v = dist(rng);
      if (used.insert(v).second) a.push_back(v);
    }
    while (b.size() < 8) {
      double v = dist(rng);
      if (used.insert(v).second) b.push_back(v);
    }
    double p_exact = mann_whitney_u(a, b, MannWhitneyMode::exact).p_value;
    double p_approx = mann_whitney_u(a, b, MannWhitneyMode::approx).p_value;
    REQUIRE(std::abs(p_exact - p_approx) <= 0.02);
  }

  TestResult kw = kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  REQUIRE(std::abs(kw.statistic - 7.2) <= 1e-9);
  REQUIRE(std::abs(kw.p_value - std::exp(-3.6)) <= 1e-6);

  double elapsed = seconds_since(start);
  REQUIRE(elapsed < 10.0);
  report(2, "Mann-Whitney exact/approx + Kruskal-Wallis, " + std::to_string(elapsed) + "s");
}

TEST_CASE("criterion 3: numeric tails") {
  REQUIRE(std::abs(chi_square_sf(3.841, 1) - 0.0500) <= 5e-4);
  REQUIRE(std::abs(normal_sf(1.959964) - 0.0250) <= 1e-5);
  report(3, "chi-square and normal tail reference points");
}

TEST_CASE("criterion 4: perfect-agent end-to-end fixed point") {
  auto start = Clock::now();
  TestDir dir("criterion4");
  CampaignConfig cfg = perfect_agent_config(dir, "out");

  CampaignSummary summary = run_campaign(cfg);
  const size_t cells = 2 * 5 * 8;
  REQUIRE(summary.completed == cells + 2 * 5);
  REQUIRE(summary.failed == 0);

  auto records = RunStore::load(dir.str("out/records.jsonl"));
  REQUIRE(records.size() == cells + 2 * 5);
  for (const RunRecord& r : records) {
    REQUIRE(r.status == RunStatus::complete);
    REQUIRE(r.eval.solution_score == 1.0);
    REQUIRE(r.eval.score_delta == 0.0);
  }

  auto rows = model_summary(records);
  REQUIRE(rows.size() == 2);
  for (const ModelSummaryRow& row : rows) {
    REQUIRE(row.core.mean_score == 1.0);
    REQUIRE(row.core.mad == 0.0);
    REQUIRE(row.core.stability_rate == 1.0);
  }
  HeatmapMatrix deltas = mr_model_matrix(records, HeatmapMetric::delta);
  for (size_t i = 0; i < deltas.values.size(); ++i) {
    for (size_t j = 0; j < deltas.values[i].size(); ++j) {
      REQUIRE(deltas.counts[i][j] == 5);
      REQUIRE(deltas.values[i][j] == 0.0);
    }
  }

  double elapsed = seconds_since(start);
  REQUIRE(elapsed < 30.0);
  report(4, "5 problems x 8 relations x 2 mock models, " + std::to_string(elapsed) + "s");
}

TEST_CASE("criterion 5: paper-scale plan consistency") {
  Corpus corpus = load_corpus(shipped_corpus_path());
  REQUIRE(corpus.problems.size() == 19);

  CampaignConfig cfg;
  for (int i = 1; i <= 7; ++i) {
    AgentConfig m;
    m.model_id = "model-" + std::to_string(i);
    m.endpoint_url = "mock:reference-echo";
    cfg.models.push_back(m);
  }
  cfg.relations = all_relations();
  cfg.seed = 1;

  CampaignPlan plan = plan_campaign(cfg, corpus);
  REQUIRE(plan.cells.size() == 1064);  // 7 x 19 x 8

  std::map<std::string, size_t> per_model;
  for (const PlannedCell& c : plan.cells) per_model[c.model_id] += 1;
  REQUIRE(per_model.size() == 7);
  for (const auto& [model, count] : per_model) REQUIRE(count == 152);

  // Arithmetic cross-check of the reported stability percentages against the
  // 152-cell denominator: 79.6% ~ 121/152 and 27.0% ~ 41/152.
  REQUIRE(std::abs(121.0 / 152.0 - 0.796) < 5e-4);
  REQUIRE(std::abs(41.0 / 152.0 - 0.270) < 5e-4);

  report(5, "1064-cell plan, 152 per model, stability denominators");
}

TEST_CASE("criterion 6: resumability after a mid-run kill") {
  TestDir dir("criterion6");

  // Uninterrupted reference run.
  CampaignConfig full_cfg = perfect_agent_config(dir, "full");
  run_campaign(full_cfg);
  AnalysisResult full = analyze(RunStore::load(dir.str("full/records.jsonl")));
  write_reports(full, dir.str("full_reports"));

  // Interrupted run. The stop hook is consulted once per transform pair (40),
  // once per baseline (10) and once per cell (80); a budget of 60 kills the
  // campaign after the baselines and the first handful of cells.
  const size_t total = 2 * 5 + 2 * 5 * 8;  // baselines + cells = 90
  CampaignConfig cfg = perfect_agent_config(dir, "resumed");
  std::atomic<size_t> consulted{0};
  RunHooks killer;
  killer.should_stop = [&] { return ++consulted > 60; };
  CampaignSummary first = run_campaign(cfg, killer);
  REQUIRE(first.stopped > 0);
  REQUIRE(first.completed > 0);
  REQUIRE(first.completed < total);

  // Resume without the kill switch.
  CampaignSummary second = run_campaign(cfg);
  REQUIRE(second.failed == 0);
  REQUIRE(second.stopped == 0);
  REQUIRE(second.skipped == first.completed);
  REQUIRE(first.completed + second.completed == total);

  // Exactly one complete record per key in the raw line file.
  std::map<std::string, int> complete_per_key;
  std::ifstream in(dir.str("resumed/records.jsonl"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RunRecord r = run_record_from_json_line(line);
    if (r.status == RunStatus::complete) complete_per_key[r.key()] += 1;
  }
  REQUIRE(complete_per_key.size() == total);
  for (const auto& [key, count] : complete_per_key) REQUIRE(count == 1);

  // Analysis of the resumed store is byte-identical to the uninterrupted one.
  AnalysisResult resumed = analyze(RunStore::load(dir.str("resumed/records.jsonl")));
  write_reports(resumed, dir.str("resumed_reports"));
  for (std::string name :
       {"model_summary.csv", "model_summary.json", "model_summary.md", "heatmap_delta.csv",
        "heatmap_semsim.csv", "distributions.json", "significance.csv", "significance.md",
        "analysis.json"}) {
    REQUIRE(slurp(dir.path / "full_reports" / name) ==
            slurp(dir.path / "resumed_reports" / name));
  }

  report(6, "kill/resume yields one record per key and identical analysis");
}

TEST_CASE("criterion 7: transformation invariants over 100 randomized cases") {
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 100; ++trial) {
    Problem p;
    p.id = "rand-" + std::to_string(trial);
    p.category = Category::Physics;
    p.difficulty = Difficulty::Easy;
    p.statement = random_statement(rng);
    p.reference_answer = "n/a";
    p.reference_steps = {"step one of the synthetic reference.",
                         "step two of the synthetic reference."};
    uint64_t seed = rng();

    // Identity is byte-identical.
    TransformedProblem identity = apply_rule_transform(Relation::identity, p, seed);
    REQUIRE(identity.text == p.statement);
    REQUIRE(identity.checks_passed());

    // Rule reorder preserves the sentence multiset and is seed-deterministic.
    TransformedProblem reorder_a = apply_rule_transform(Relation::reorder_facts, p, seed);
    TransformedProblem reorder_b = apply_rule_transform(Relation::reorder_facts, p, seed);
    REQUIRE(reorder_a.text == reorder_b.text);
    auto sentences = split_sentences(p.statement);
    auto reordered = split_sentences(reorder_a.text);
    REQUIRE(std::multiset<std::string>(sentences.begin(), sentences.end()) ==
            std::multiset<std::string>(reordered.begin(), reordered.end()));
    REQUIRE(reorder_a.checks_passed());
    if (sentences.size() < 2) REQUIRE(!reorder_a.warnings.empty());

    // Contract/expand checkers reject length-violating candidates.
    auto contract_checks = check_transform(Relation::contract, p.statement, p.statement + " x",
                                           TransformMethod::llm);
    bool contract_rejected = false;
    for (const CheckResult& c : contract_checks) {
      if (c.name == "strictly_shorter") contract_rejected = !c.passed;
    }
    REQUIRE(contract_rejected);
    auto expand_checks = check_transform(
        Relation::expand, p.statement, p.statement.substr(0, p.statement.size() / 2),
        TransformMethod::llm);
    bool expand_rejected = false;
    for (const CheckResult& c : expand_checks) {
      if (c.name == "strictly_longer") expand_rejected = !c.passed;
    }
    REQUIRE(expand_rejected);

    // Contextual templates contain the original statement verbatim.
    for (Relation r : {Relation::context_academic, Relation::context_business}) {
      TransformedProblem framed = apply_rule_transform(r, p, seed);
      REQUIRE(framed.text.find(p.statement) != std::string::npos);
      REQUIRE(framed.checks_passed());
    }
  }
  report(7, "identity/reorder/length/contextual invariants, 100 cases");
}

TEST_CASE("criterion 8: report shape") {
  TestDir dir("criterion8");

  // Store 1: the perfect-agent campaign from criterion 4's configuration.
  CampaignConfig cfg = perfect_agent_config(dir, "out");
  run_campaign(cfg);
  auto records = RunStore::load(dir.str("out/records.jsonl"));

  // Store 2: a synthetic 4-model store with varied deltas.
  std::vector<RunRecord> synthetic;
  std::mt19937 rng(77);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (std::string model : {"m1", "m2", "m3", "m4"}) {
    double bias = model == "m4" ? -0.25 : 0.0;
    for (int i = 0; i < 10; ++i) {
      std::string pid = "p" + std::to_string(i);
      RunRecord b;
      b.eval = make_evaluation_record(model, pid, "baseline", 0.7, 0.7, 0.6, 1.0);
      b.status = RunStatus::complete;
      synthetic.push_back(b);
      for (Relation rel : all_relations()) {
        double d = rel == Relation::identity ? 0.0 : bias + noise(rng);
        RunRecord r;
        r.eval = make_evaluation_record(model, pid, relation_to_string(rel), 0.7 + d, 0.7,
                                        0.6, 0.9);
        r.status = RunStatus::complete;
        synthetic.push_back(r);
      }
    }
  }

  int store_index = 0;
  for (const auto& store : {records, synthetic}) {
    ++store_index;
    const size_t n_models = store_index == 1 ? 2 : 4;
    AnalysisResult result = analyze(store);
    std::string out = dir.str("reports" + std::to_string(store_index));
    write_reports(result, out);

    // Summary: exactly the four metric columns.
    std::istringstream csv(slurp(fs::path(out) / "model_summary.csv"));
    std::string header;
    std::getline(csv, header);
    REQUIRE(header == "model,score,mad,stability,sem_sim");
    size_t data_rows = 0;
    std::string row;
    while (std::getline(csv, row)) {
      if (!row.empty()) ++data_rows;
    }
    REQUIRE(data_rows == n_models);

    // Two 8 x M heatmap matrices.
    for (const HeatmapMatrix* m : {&result.heatmap_delta, &result.heatmap_semsim}) {
      REQUIRE(m->relations.size() == 8);
      REQUIRE(m->models.size() == n_models);
      REQUIRE(m->values.size() == 8);
      REQUIRE(m->counts.size() == 8);
    }

    // Distribution summaries satisfy Q1 <= median <= Q3 in every cell.
    REQUIRE(result.distributions.size() == 8 * n_models);
    for (const DistributionSummary& d : result.distributions) {
      REQUIRE(d.q1 <= d.median);
      REQUIRE(d.median <= d.q3);
      REQUIRE(d.n > 0);
    }

    // Significance: C(M,2) rows plus the p < 0.05 filtered view.
    REQUIRE(result.significance.pairwise.size() == n_models * (n_models - 1) / 2);
    for (const PairwiseTest& t : result.significance.significant) {
      REQUIRE(t.result.p_value < 0.05);
    }
    for (size_t i = 1; i < result.significance.pairwise.size(); ++i) {
      REQUIRE(result.significance.pairwise[i - 1].result.p_value <=
              result.significance.pairwise[i].result.p_value);
    }
  }

  // The synthetic store separates m4 from the rest.
  AnalysisResult synthetic_result = analyze(synthetic);
  REQUIRE(synthetic_result.significance.significant.size() >= 3);

  report(8, "summary columns, 8xM heatmaps, quartile sanity, C(M,2) significance");
}
