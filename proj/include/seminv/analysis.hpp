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

#ifndef SEMINV_ANALYSIS_HPP
#define SEMINV_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "seminv/metrics.hpp"
#include "seminv/stats.hpp"
#include "seminv/store.hpp"

namespace seminv {

class AnalysisError : public std::runtime_error {
 public:
  explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

// Per-model summary row: the four summary-table metrics plus the companion
// readings the harness reports alongside them (baseline-only mean score and
// mean step similarity).
struct ModelSummaryRow {
  RobustnessSummary core;     // mean score (all records), MAD, stability, sem. sim.
  double score_baseline = 0.0;
  double mean_step_score = 0.0;
  size_t n_records = 0;
};

// Relation x model mean matrix. A cell with count 0 is missing, never a
// silent zero.
struct HeatmapMatrix {
  std::vector<std::string> relations;  // 8 rows, canonical relation order
  std::vector<std::string> models;     // columns, sorted by model id
  std::vector<std::vector<double>> values;
  std::vector<std::vector<size_t>> counts;
};

enum class HeatmapMetric { delta, trace_sim };

// Box-plot summary per (relation, model) cell.
struct DistributionSummary {
  std::string relation;
  std::string model_id;
  size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;   // lowest point inside Q1 - 1.5*IQR
  double whisker_high = 0.0;  // highest point inside Q3 + 1.5*IQR
  std::vector<double> outliers;
};

// Quartiles by the median-of-halves rule (the median itself is excluded from
// both halves when n is odd); whiskers by the 1.5*IQR convention clamped to
// the data extremes.
struct BoxStats {
  double median = 0.0, q1 = 0.0, q3 = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;
  std::vector<double> outliers;
};
BoxStats box_stats(std::vector<double> values);

struct PairwiseTest {
  std::string model_a;
  std::string model_b;
  TestResult result;
};

struct WithinModelTest {
  std::string model_id;
  std::optional<TestResult> result;  // Kruskal-Wallis across relation groups
  std::string error;                 // set when the test is undefined
};

struct SignificanceTable {
  std::vector<PairwiseTest> pairwise;     // all C(M,2) pairs, ascending p
  std::vector<PairwiseTest> significant;  // p < 0.05 subset
  std::vector<WithinModelTest> within_model;
};

enum class SampleKind { deltas, scores };

struct AnalysisResult {
  std::vector<ModelSummaryRow> summary;
  HeatmapMatrix heatmap_delta;
  HeatmapMatrix heatmap_semsim;
  std::vector<DistributionSummary> distributions;
  SignificanceTable significance;
  SampleKind sample_kind = SampleKind::deltas;
};

// All aggregates are pure functions of the (deduplicated, complete) store:
// re-analysis of the same records is byte-identical.

// Rows sorted by mean score descending (ties by model id).
std::vector<ModelSummaryRow> model_summary(const std::vector<RunRecord>& store);

HeatmapMatrix mr_model_matrix(const std::vector<RunRecord>& store, HeatmapMetric metric);

std::vector<DistributionSummary> distribution_summary(const std::vector<RunRecord>& store);

// Pairwise Mann-Whitney over per-instance samples (score deltas by default),
// plus per-model Kruskal-Wallis across relation groups.
SignificanceTable significance_table(const std::vector<RunRecord>& store,
                                     SampleKind sample = SampleKind::deltas);

AnalysisResult analyze(const std::vector<RunRecord>& store,
                       SampleKind sample = SampleKind::deltas);

// Writes model_summary.{csv,json,md}, heatmap_delta.csv, heatmap_semsim.csv,
// distributions.json, significance.{csv,md} and the canonical analysis.json.
void write_reports(const AnalysisResult& result, const std::string& out_dir);

// Canonical JSON form (what analysis.json contains).
std::string analysis_to_json_text(const AnalysisResult& result);

// Renderers used by `report`; read back the canonical JSON.
AnalysisResult analysis_from_json_text(const std::string& text);
std::string render_model_summary_csv(const AnalysisResult& result);
std::string render_markdown_report(const AnalysisResult& result);

}  // namespace seminv

#endif  // SEMINV_ANALYSIS_HPP
