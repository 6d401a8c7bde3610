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

#ifndef SEMINV_METRICS_HPP
#define SEMINV_METRICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "seminv/embed.hpp"

namespace seminv {

class MetricsError : public std::runtime_error {
 public:
  explicit MetricsError(const std::string& what) : std::runtime_error(what) {}
};

// One (model, problem, relation) evaluation cell.
struct EvaluationRecord {
  std::string model_id;
  std::string problem_id;
  std::string relation;        // relation name, or "baseline" for the untransformed inference
  double solution_score = 0.0; // cosine(agent solution, reference)
  double baseline_score = 0.0; // score of the untransformed inference
  double score_delta = 0.0;    // solution_score - baseline_score, by construction
  double avg_step_score = 0.0;
  double trace_similarity = 0.0;
  std::string timestamp;       // ISO-8601 UTC
  std::string response_ref;    // key of the persisted raw response
};

// Per-model aggregate row (the summary-table shape).
struct RobustnessSummary {
  std::string model_id;
  double mean_score = 0.0;
  double mad = 0.0;
  double stability_rate = 0.0;
  double mean_semantic_similarity = 0.0;
};

// Sets score_delta = solution_score - baseline_score; the two stay consistent
// by construction.
EvaluationRecord make_evaluation_record(std::string model_id, std::string problem_id,
                                        std::string relation, double solution_score,
                                        double baseline_score, double avg_step_score,
                                        double trace_similarity);

// Whole-solution semantic similarity: cosine of the two texts' embeddings.
double solution_score(const std::string& solution_text, const std::string& reference_text,
                      EmbeddingProvider& provider);

// Invariance delta; negative means degradation under the transformation.
double score_delta(double transformed_score, double baseline_score);

struct StepScores {
  std::vector<double> per_step;  // one per agent step: max cosine over reference steps
  double average = 0.0;          // mean over agent steps
};

StepScores step_scores(const std::vector<std::string>& agent_steps,
                       const std::vector<std::string>& reference_steps,
                       EmbeddingProvider& provider);

// Coherence of two reasoning traces: cosine of the embeddings of the
// newline-concatenated steps.
double trace_similarity(const std::vector<std::string>& trace_a,
                        const std::vector<std::string>& trace_b, EmbeddingProvider& provider);

// Mean |score_delta| over non-identity transformation records. Identity
// records in the input are ignored (the delta definition excludes them);
// throws when nothing remains.
double mad(const std::vector<EvaluationRecord>& records);

// Proportion of records with |score_delta| strictly below the threshold.
double stability_rate(const std::vector<EvaluationRecord>& records, double threshold = 0.05);

}  // namespace seminv

#endif  // SEMINV_METRICS_HPP
