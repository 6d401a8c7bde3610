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

#include "seminv/metrics.hpp"

#include <cmath>

namespace seminv {

namespace {

constexpr double kScoreBoundSlack = 1e-9;

void require_score_range(double value, const char* who) {
  if (!std::isfinite(value) || std::abs(value) > 1.0 + kScoreBoundSlack) {
    throw MetricsError(std::string(who) + ": score " + std::to_string(value) +
                       " outside [-1, 1]");
  }
}

std::string join_steps(const std::vector<std::string>& steps) {
  std::string out;
  for (const std::string& s : steps) {
    if (!out.empty()) out.push_back('\n');
    out += s;
  }
  return out;
}

}  // namespace

EvaluationRecord make_evaluation_record(std::string model_id, std::string problem_id,
                                        std::string relation, double solution_score,
                                        double baseline_score, double avg_step_score,
                                        double trace_similarity) {
  require_score_range(solution_score, "make_evaluation_record");
  require_score_range(baseline_score, "make_evaluation_record");
  EvaluationRecord rec;
  rec.model_id = std::move(model_id);
  rec.problem_id = std::move(problem_id);
  rec.relation = std::move(relation);
  rec.solution_score = solution_score;
  rec.baseline_score = baseline_score;
  rec.score_delta = solution_score - baseline_score;
  rec.avg_step_score = avg_step_score;
  rec.trace_similarity = trace_similarity;
  return rec;
}

double solution_score(const std::string& solution_text, const std::string& reference_text,
                      EmbeddingProvider& provider) {
  if (solution_text.empty() || reference_text.empty()) {
    throw MetricsError("solution_score: empty text");
  }
  std::vector<EmbeddingVector> vectors = provider.embed({solution_text, reference_text});
  return cosine(vectors[0], vectors[1]);
}

double score_delta(double transformed_score, double baseline_score) {
  require_score_range(transformed_score, "score_delta");
  require_score_range(baseline_score, "score_delta");
  return transformed_score - baseline_score;
}

StepScores step_scores(const std::vector<std::string>& agent_steps,
                       const std::vector<std::string>& reference_steps,
                       EmbeddingProvider& provider) {
  if (agent_steps.empty()) throw MetricsError("step_scores: empty agent step list");
  if (reference_steps.empty()) throw MetricsError("step_scores: empty reference step list");

  std::vector<std::string> texts = agent_steps;
  texts.insert(texts.end(), reference_steps.begin(), reference_steps.end());
  std::vector<EmbeddingVector> vectors = provider.embed(texts);

  StepScores out;
  out.per_step.reserve(agent_steps.size());
  double sum = 0.0;
  for (size_t i = 0; i < agent_steps.size(); ++i) {
    // Max over reference steps allows for step reordering.
    double best = -1.0;
    for (size_t j = 0; j < reference_steps.size(); ++j) {
      best = std::max(best, cosine(vectors[i], vectors[agent_steps.size() + j]));
    }
    out.per_step.push_back(best);
    sum += best;
  }
  out.average = sum / static_cast<double>(agent_steps.size());
  return out;
}

double trace_similarity(const std::vector<std::string>& trace_a,
                        const std::vector<std::string>& trace_b,
                        EmbeddingProvider& provider) {
  if (trace_a.empty() || trace_b.empty()) throw MetricsError("trace_similarity: empty trace");
  std::vector<EmbeddingVector> vectors =
      provider.embed({join_steps(trace_a), join_steps(trace_b)});
  return cosine(vectors[0], vectors[1]);
}

double mad(const std::vector<EvaluationRecord>& records) {
  double sum = 0.0;
  size_t count = 0;
  for (const EvaluationRecord& rec : records) {
    if (rec.relation == "identity" || rec.relation == "baseline") continue;
    sum += std::abs(rec.score_delta);
    ++count;
  }
  if (count == 0) throw MetricsError("mad: no non-identity records");
  return sum / static_cast<double>(count);
}

double stability_rate(const std::vector<EvaluationRecord>& records, double threshold) {
  if (records.empty()) throw MetricsError("stability_rate: empty record set");
  size_t stable = 0;
  for (const EvaluationRecord& rec : records) {
    if (std::abs(rec.score_delta) < threshold) ++stable;  // strict: |delta| == threshold is unstable
  }
  return static_cast<double>(stable) / static_cast<double>(records.size());
}

}  // namespace seminv
