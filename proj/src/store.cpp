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

#include "seminv/store.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace seminv {

using nlohmann::json;

std::string run_status_to_string(RunStatus s) {
  return s == RunStatus::complete ? "complete" : "failed";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "complete") return RunStatus::complete;
  if (s == "failed") return RunStatus::failed;
  throw StoreError("unknown run status \"" + s + "\"");
}

std::string run_key(const std::string& model_id, const std::string& problem_id,
                    const std::string& relation) {
  return model_id + "/" + problem_id + "/" + relation;
}

std::string RunRecord::key() const {
  return run_key(eval.model_id, eval.problem_id, eval.relation);
}

std::string run_record_to_json_line(const RunRecord& r) {
  json obj;
  obj["model_id"] = r.eval.model_id;
  obj["problem_id"] = r.eval.problem_id;
  obj["relation"] = r.eval.relation;
  obj["solution_score"] = r.eval.solution_score;
  obj["baseline_score"] = r.eval.baseline_score;
  obj["score_delta"] = r.eval.score_delta;
  obj["avg_step_score"] = r.eval.avg_step_score;
  obj["trace_similarity"] = r.eval.trace_similarity;
  obj["timestamp"] = r.eval.timestamp;
  obj["response_ref"] = r.eval.response_ref;
  obj["raw_response"] = r.raw_response;
  obj["transformed_text"] = r.transformed_text;
  obj["status"] = run_status_to_string(r.status);
  obj["error"] = r.error;
  obj["attempts"] = r.attempts;
  obj["latency_ms"] = r.latency_ms;
  return obj.dump();
}

RunRecord run_record_from_json_line(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw StoreError(std::string("malformed store line: ") + e.what());
  }
  RunRecord r;
  r.eval.model_id = obj.at("model_id").get<std::string>();
  r.eval.problem_id = obj.at("problem_id").get<std::string>();
  r.eval.relation = obj.at("relation").get<std::string>();
  r.eval.solution_score = obj.value("solution_score", 0.0);
  r.eval.baseline_score = obj.value("baseline_score", 0.0);
  r.eval.score_delta = obj.value("score_delta", 0.0);
  r.eval.avg_step_score = obj.value("avg_step_score", 0.0);
  r.eval.trace_similarity = obj.value("trace_similarity", 0.0);
  r.eval.timestamp = obj.value("timestamp", "");
  r.eval.response_ref = obj.value("response_ref", "");
  r.raw_response = obj.value("raw_response", "");
  r.transformed_text = obj.value("transformed_text", "");
  r.status = run_status_from_string(obj.value("status", "failed"));
  r.error = obj.value("error", "");
  r.attempts = obj.value("attempts", 0);
  r.latency_ms = obj.value("latency_ms", 0L);
  return r;
}

RunStore::RunStore(std::string path) : path_(std::move(path)) {}

void RunStore::append(const RunRecord& record) {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot open store \"" + path_ + "\" for append");
  out << run_record_to_json_line(record) << "\n";
  out.flush();
  if (!out) throw StoreError("write to store \"" + path_ + "\" failed");
}

std::map<std::string, RunRecord> dedupe_records(const std::vector<RunRecord>& records) {
  std::map<std::string, RunRecord> by_key;
  for (const RunRecord& r : records) {
    auto it = by_key.find(r.key());
    if (it == by_key.end()) {
      by_key.emplace(r.key(), r);
    } else if (it->second.status == RunStatus::failed || r.status == RunStatus::complete) {
      // Later records win unless that would replace a complete with a failure.
      if (!(it->second.status == RunStatus::complete && r.status == RunStatus::failed)) {
        it->second = r;
      }
    }
  }
  return by_key;
}

std::vector<RunRecord> RunStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::vector<RunRecord> raw;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      raw.push_back(run_record_from_json_line(line));
    } catch (const StoreError&) {
      // Torn line from an interrupted write; the cell will simply rerun.
      continue;
    }
  }
  std::map<std::string, RunRecord> by_key = dedupe_records(raw);
  std::vector<RunRecord> out;
  out.reserve(by_key.size());
  for (auto& [key, record] : by_key) out.push_back(std::move(record));
  return out;
}

void RunStore::compact(const std::string& path) {
  std::vector<RunRecord> records = load(path);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot open \"" + tmp + "\" for writing");
    for (const RunRecord& r : records) out << run_record_to_json_line(r) << "\n";
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw StoreError("cannot replace store \"" + path + "\" with compacted file");
  }
}

}  // namespace seminv
