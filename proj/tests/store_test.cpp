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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include "seminv/store.hpp"

using namespace seminv;

namespace {

RunRecord make_record(const std::string& model, const std::string& problem,
                      const std::string& relation, RunStatus status, double score = 0.9) {
  RunRecord r;
  r.eval = make_evaluation_record(model, problem, relation, score, 0.8, 0.7, 0.95);
  r.eval.timestamp = "2026-08-10T00:00:00Z";
  r.eval.response_ref = run_key(model, problem, relation);
  r.raw_response = "Step 1: work\nFinal answer: done";
  r.transformed_text = "some transformed text with \"quotes\" and\nnewlines";
  r.status = status;
  r.error = status == RunStatus::failed ? "simulated failure" : "";
  r.attempts = 1;
  r.latency_ms = 12;
  return r;
}

struct TmpFile {
  std::string path;
  explicit TmpFile(std::string p) : path(std::move(p)) { std::remove(path.c_str()); }
  ~TmpFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("record lines round-trip all fields") {
  RunRecord r = make_record("model-a", "p1", "paraphrase", RunStatus::complete, 0.87);
  RunRecord back = run_record_from_json_line(run_record_to_json_line(r));
  CHECK(back.eval.model_id == r.eval.model_id);
  CHECK(back.eval.problem_id == r.eval.problem_id);
  CHECK(back.eval.relation == r.eval.relation);
  CHECK(back.eval.solution_score == r.eval.solution_score);
  CHECK(back.eval.baseline_score == r.eval.baseline_score);
  CHECK(back.eval.score_delta == r.eval.score_delta);
  CHECK(back.eval.avg_step_score == r.eval.avg_step_score);
  CHECK(back.eval.trace_similarity == r.eval.trace_similarity);
  CHECK(back.eval.timestamp == r.eval.timestamp);
  CHECK(back.raw_response == r.raw_response);
  CHECK(back.transformed_text == r.transformed_text);
  CHECK(back.status == r.status);
  CHECK(back.attempts == r.attempts);
  CHECK(back.latency_ms == r.latency_ms);
  CHECK(back.key() == r.key());
}

TEST_CASE("append then load yields one record per key") {
  TmpFile tmp("store_test_basic.jsonl");
  RunStore store(tmp.path);
  store.append(make_record("a", "p1", "baseline", RunStatus::complete));
  store.append(make_record("a", "p1", "identity", RunStatus::complete));
  store.append(make_record("b", "p1", "identity", RunStatus::failed));

  auto records = RunStore::load(tmp.path);
  REQUIRE(records.size() == 3);
  std::set<std::string> keys;
  for (const RunRecord& r : records) keys.insert(r.key());
  CHECK(keys.size() == 3);
}

TEST_CASE("a complete record wins over a failed one for the same key") {
  TmpFile tmp("store_test_dedupe.jsonl");
  RunStore store(tmp.path);
  store.append(make_record("a", "p1", "expand", RunStatus::failed));
  store.append(make_record("a", "p1", "expand", RunStatus::complete, 0.91));
  // A later failure must not clobber the completed cell.
  store.append(make_record("a", "p1", "expand", RunStatus::failed));

  auto records = RunStore::load(tmp.path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].status == RunStatus::complete);
  CHECK(records[0].eval.solution_score == 0.91);
}

TEST_CASE("later complete records replace earlier ones") {
  TmpFile tmp("store_test_last_wins.jsonl");
  RunStore store(tmp.path);
  store.append(make_record("a", "p1", "expand", RunStatus::complete, 0.5));
  store.append(make_record("a", "p1", "expand", RunStatus::complete, 0.6));
  auto records = RunStore::load(tmp.path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].eval.solution_score == 0.6);
}

TEST_CASE("a torn trailing line is skipped on load") {
  TmpFile tmp("store_test_torn.jsonl");
  RunStore store(tmp.path);
  store.append(make_record("a", "p1", "identity", RunStatus::complete));
  {
    std::ofstream out(tmp.path, std::ios::app | std::ios::binary);
    out << "{\"model_id\": \"a\", \"problem_id\": \"p2\"";  // crash mid-write
  }
  auto records = RunStore::load(tmp.path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].eval.problem_id == "p1");
}

TEST_CASE("loading a missing store is an empty store") {
  CHECK(RunStore::load("/nonexistent/records.jsonl").empty());
}

TEST_CASE("compaction rewrites to one line per key") {
  TmpFile tmp("store_test_compact.jsonl");
  RunStore store(tmp.path);
  for (int i = 0; i < 5; ++i) {
    store.append(make_record("a", "p1", "expand", RunStatus::failed));
  }
  store.append(make_record("a", "p1", "expand", RunStatus::complete));
  store.append(make_record("a", "p2", "expand", RunStatus::complete));
  RunStore::compact(tmp.path);

  std::ifstream in(tmp.path);
  size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++lines;
  }
  CHECK(lines == 2);
  auto records = RunStore::load(tmp.path);
  CHECK(records.size() == 2);
  for (const RunRecord& r : records) CHECK(r.status == RunStatus::complete);
}

TEST_CASE("concurrent appends keep every line parseable") {
  TmpFile tmp("store_test_concurrent.jsonl");
  RunStore store(tmp.path);
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&store, t] {
      for (int i = 0; i < 25; ++i) {
        store.append(make_record("model-" + std::to_string(t), "p" + std::to_string(i),
                                 "identity", RunStatus::complete));
      }
    });
  }
  for (auto& w : workers) w.join();
  auto records = RunStore::load(tmp.path);
  CHECK(records.size() == 8 * 25);
}
