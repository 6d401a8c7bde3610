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

#ifndef SEMINV_STORE_HPP
#define SEMINV_STORE_HPP

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "seminv/metrics.hpp"

namespace seminv {

class StoreError : public std::runtime_error {
 public:
  explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

enum class RunStatus { complete, failed };

std::string run_status_to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

// One persisted campaign cell: the evaluation metrics plus the raw material
// needed to recompute them. The baseline inference uses the pseudo-relation
// "baseline".
struct RunRecord {
  EvaluationRecord eval;
  std::string raw_response;
  std::string transformed_text;
  RunStatus status = RunStatus::failed;
  std::string error;
  int attempts = 0;
  long latency_ms = 0;

  std::string key() const;  // model_id / problem_id / relation, unique per store
};

std::string run_key(const std::string& model_id, const std::string& problem_id,
                    const std::string& relation);

std::string run_record_to_json_line(const RunRecord& record);
RunRecord run_record_from_json_line(const std::string& line);

// Append-only JSONL store (one record per line, UTF-8). Appends are atomic
// per line under an internal mutex; loading keeps the last record per key,
// preferring complete over failed, so an interrupted run followed by a resume
// never yields duplicate complete keys. A torn trailing line (crash during
// write) is skipped on load.
class RunStore {
 public:
  explicit RunStore(std::string path);

  void append(const RunRecord& record);
  const std::string& path() const { return path_; }

  // All surviving records (one per key) in deterministic key order.
  static std::vector<RunRecord> load(const std::string& path);
  // Rewrites the file to one line per key.
  static void compact(const std::string& path);

 private:
  std::string path_;
  std::mutex mu_;
};

// Last record per key, complete preferred over failed.
std::map<std::string, RunRecord> dedupe_records(const std::vector<RunRecord>& records);

}  // namespace seminv

#endif  // SEMINV_STORE_HPP
