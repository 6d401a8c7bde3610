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

#include "seminv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "seminv/transform.hpp"

namespace seminv {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool is_relation_record(const RunRecord& r) {
  return r.status == RunStatus::complete && r.eval.relation != "baseline";
}

bool is_baseline_record(const RunRecord& r) {
  return r.status == RunStatus::complete && r.eval.relation == "baseline";
}

std::vector<std::string> sorted_model_ids(const std::vector<RunRecord>& store) {
  std::set<std::string> ids;
  for (const RunRecord& r : store) {
    if (r.status == RunStatus::complete) ids.insert(r.eval.model_id);
  }
  return {ids.begin(), ids.end()};
}

std::string format6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

double median_sorted(const std::vector<double>& v, size_t begin, size_t end) {
  size_t n = end - begin;
  size_t mid = begin + n / 2;
  if (n % 2 == 1) return v[mid];
  return (v[mid - 1] + v[mid]) / 2.0;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw AnalysisError("cannot open \"" + path.string() + "\" for writing");
  out << content;
}

}  // namespace

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw AnalysisError("box_stats: empty input");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();

  BoxStats stats;
  stats.median = median_sorted(values, 0, n);
  if (n == 1) {
    stats.q1 = stats.q3 = values[0];
  } else if (n % 2 == 0) {
    stats.q1 = median_sorted(values, 0, n / 2);
    stats.q3 = median_sorted(values, n / 2, n);
  } else {
    // Exclusive halves: the median observation belongs to neither half.
    stats.q1 = median_sorted(values, 0, n / 2);
    stats.q3 = median_sorted(values, n / 2 + 1, n);
  }

  const double iqr = stats.q3 - stats.q1;
  const double fence_low = stats.q1 - 1.5 * iqr;
  const double fence_high = stats.q3 + 1.5 * iqr;
  stats.whisker_low = stats.median;
  stats.whisker_high = stats.median;
  bool found = false;
  for (double v : values) {
    if (v < fence_low || v > fence_high) {
      stats.outliers.push_back(v);
      continue;
    }
    if (!found) {
      stats.whisker_low = stats.whisker_high = v;
      found = true;
    } else {
      stats.whisker_low = std::min(stats.whisker_low, v);
      stats.whisker_high = std::max(stats.whisker_high, v);
    }
  }
  return stats;
}

std::vector<ModelSummaryRow> model_summary(const std::vector<RunRecord>& store) {
  if (store.empty()) throw AnalysisError("model_summary: empty store");

  std::vector<ModelSummaryRow> rows;
  for (const std::string& model : sorted_model_ids(store)) {
    std::vector<EvaluationRecord> relation_records;
    std::vector<double> scores, baselines, trace_sims, step_scores;
    for (const RunRecord& r : store) {
      if (r.eval.model_id != model) continue;
      if (is_relation_record(r)) {
        relation_records.push_back(r.eval);
        scores.push_back(r.eval.solution_score);
        trace_sims.push_back(r.eval.trace_similarity);
        step_scores.push_back(r.eval.avg_step_score);
      } else if (is_baseline_record(r)) {
        baselines.push_back(r.eval.solution_score);
      }
    }
    if (relation_records.empty()) continue;

    ModelSummaryRow row;
    row.core.model_id = model;
    row.core.mean_score = mean_of(scores);
    bool has_non_identity = std::any_of(
        relation_records.begin(), relation_records.end(),
        [](const EvaluationRecord& e) { return e.relation != "identity"; });
    row.core.mad = has_non_identity ? mad(relation_records) : 0.0;
    row.core.stability_rate = stability_rate(relation_records);
    row.core.mean_semantic_similarity = mean_of(trace_sims);
    row.score_baseline = mean_of(baselines);
    row.mean_step_score = mean_of(step_scores);
    row.n_records = relation_records.size();
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw AnalysisError("model_summary: no complete transformation records");

  std::sort(rows.begin(), rows.end(), [](const ModelSummaryRow& a, const ModelSummaryRow& b) {
    if (a.core.mean_score != b.core.mean_score) return a.core.mean_score > b.core.mean_score;
    return a.core.model_id < b.core.model_id;
  });
  return rows;
}

HeatmapMatrix mr_model_matrix(const std::vector<RunRecord>& store, HeatmapMetric metric) {
  HeatmapMatrix matrix;
  for (Relation r : all_relations()) matrix.relations.push_back(relation_to_string(r));
  matrix.models = sorted_model_ids(store);

  matrix.values.assign(matrix.relations.size(),
                       std::vector<double>(matrix.models.size(), 0.0));
  matrix.counts.assign(matrix.relations.size(),
                       std::vector<size_t>(matrix.models.size(), 0));

  std::map<std::string, size_t> relation_index, model_index;
  for (size_t i = 0; i < matrix.relations.size(); ++i) relation_index[matrix.relations[i]] = i;
  for (size_t j = 0; j < matrix.models.size(); ++j) model_index[matrix.models[j]] = j;

  for (const RunRecord& r : store) {
    if (!is_relation_record(r)) continue;
    auto ri = relation_index.find(r.eval.relation);
    auto mi = model_index.find(r.eval.model_id);
    if (ri == relation_index.end() || mi == model_index.end()) continue;
    double v = metric == HeatmapMetric::delta ? r.eval.score_delta : r.eval.trace_similarity;
    matrix.values[ri->second][mi->second] += v;
    matrix.counts[ri->second][mi->second] += 1;
  }
  for (size_t i = 0; i < matrix.values.size(); ++i) {
    for (size_t j = 0; j < matrix.values[i].size(); ++j) {
      if (matrix.counts[i][j] > 0) {
        matrix.values[i][j] /= static_cast<double>(matrix.counts[i][j]);
      }
    }
  }
  return matrix;
}

std::vector<DistributionSummary> distribution_summary(const std::vector<RunRecord>& store) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const RunRecord& r : store) {
    if (!is_relation_record(r)) continue;
    cells[{r.eval.relation, r.eval.model_id}].push_back(r.eval.score_delta);
  }

  std::vector<DistributionSummary> out;
  // Canonical relation order, then model id.
  for (Relation rel : all_relations()) {
    const std::string rel_name = relation_to_string(rel);
    for (const auto& [key, deltas] : cells) {
      if (key.first != rel_name) continue;
      BoxStats stats = box_stats(deltas);
      DistributionSummary d;
      d.relation = key.first;
      d.model_id = key.second;
      d.n = deltas.size();
      d.median = stats.median;
      d.q1 = stats.q1;
      d.q3 = stats.q3;
      d.whisker_low = stats.whisker_low;
      d.whisker_high = stats.whisker_high;
      d.outliers = stats.outliers;
      std::sort(d.outliers.begin(), d.outliers.end());
      out.push_back(std::move(d));
    }
  }
  return out;
}

SignificanceTable significance_table(const std::vector<RunRecord>& store, SampleKind sample) {
  std::vector<std::string> models = sorted_model_ids(store);
  if (models.size() < 2) throw AnalysisError("significance_table: need at least 2 models");

  std::map<std::string, std::vector<double>> samples;
  std::map<std::string, std::map<std::string, std::vector<double>>> by_relation;
  for (const RunRecord& r : store) {
    if (!is_relation_record(r)) continue;
    double v = sample == SampleKind::deltas ? r.eval.score_delta : r.eval.solution_score;
    samples[r.eval.model_id].push_back(v);
    by_relation[r.eval.model_id][r.eval.relation].push_back(r.eval.score_delta);
  }
  for (const std::string& m : models) {
    if (samples[m].size() < 2) {
      throw AnalysisError("significance_table: model \"" + m + "\" has fewer than 2 records");
    }
  }

  SignificanceTable table;
  for (size_t i = 0; i < models.size(); ++i) {
    for (size_t j = i + 1; j < models.size(); ++j) {
      PairwiseTest t;
      t.model_a = models[i];
      t.model_b = models[j];
      t.result = mann_whitney_u(samples[models[i]], samples[models[j]]);
      table.pairwise.push_back(std::move(t));
    }
  }
  std::sort(table.pairwise.begin(), table.pairwise.end(),
            [](const PairwiseTest& a, const PairwiseTest& b) {
              if (a.result.p_value != b.result.p_value) return a.result.p_value < b.result.p_value;
              if (a.model_a != b.model_a) return a.model_a < b.model_a;
              return a.model_b < b.model_b;
            });
  for (const PairwiseTest& t : table.pairwise) {
    if (t.result.p_value < 0.05) table.significant.push_back(t);
  }

  for (const std::string& m : models) {
    WithinModelTest w;
    w.model_id = m;
    std::vector<std::vector<double>> groups;
    for (Relation rel : all_relations()) {
      auto it = by_relation[m].find(relation_to_string(rel));
      if (it != by_relation[m].end() && !it->second.empty()) groups.push_back(it->second);
    }
    if (groups.size() < 2) {
      w.error = "fewer than 2 relation groups with records";
    } else {
      try {
        w.result = kruskal_wallis(groups);
      } catch (const StatsError& e) {
        w.error = e.what();
      }
    }
    table.within_model.push_back(std::move(w));
  }
  return table;
}

AnalysisResult analyze(const std::vector<RunRecord>& store, SampleKind sample) {
  AnalysisResult result;
  result.summary = model_summary(store);
  result.heatmap_delta = mr_model_matrix(store, HeatmapMetric::delta);
  result.heatmap_semsim = mr_model_matrix(store, HeatmapMetric::trace_sim);
  result.distributions = distribution_summary(store);
  if (sorted_model_ids(store).size() >= 2) {
    result.significance = significance_table(store, sample);
  }
  result.sample_kind = sample;
  return result;
}

namespace {

json heatmap_to_json(const HeatmapMatrix& m) {
  json values = json::array();
  for (size_t i = 0; i < m.values.size(); ++i) {
    json row = json::array();
    for (size_t j = 0; j < m.values[i].size(); ++j) {
      if (m.counts[i][j] == 0) {
        row.push_back(nullptr);  // missing cell, flagged rather than zeroed
      } else {
        row.push_back(m.values[i][j]);
      }
    }
    values.push_back(row);
  }
  json counts = json::array();
  for (const auto& row : m.counts) counts.push_back(row);
  return json{{"relations", m.relations}, {"models", m.models}, {"values", values},
              {"counts", counts}};
}

HeatmapMatrix heatmap_from_json(const json& obj) {
  HeatmapMatrix m;
  m.relations = obj.at("relations").get<std::vector<std::string>>();
  m.models = obj.at("models").get<std::vector<std::string>>();
  for (const json& row : obj.at("values")) {
    std::vector<double> vals;
    for (const json& cell : row) vals.push_back(cell.is_null() ? 0.0 : cell.get<double>());
    m.values.push_back(std::move(vals));
  }
  for (const json& row : obj.at("counts")) m.counts.push_back(row.get<std::vector<size_t>>());
  return m;
}

json test_result_to_json(const TestResult& r) {
  return json{{"statistic", r.statistic},
              {"p_value", r.p_value},
              {"method", test_method_to_string(r.method)},
              {"n_per_group", r.n_per_group},
              {"tie_correction", r.tie_correction}};
}

TestResult test_result_from_json(const json& obj) {
  TestResult r;
  r.statistic = obj.value("statistic", 0.0);
  r.p_value = obj.value("p_value", 1.0);
  std::string method = obj.value("method", "normal-approx");
  if (method == "exact") r.method = TestMethod::exact;
  else if (method == "chi-square-approx") r.method = TestMethod::chi_square_approx;
  else r.method = TestMethod::normal_approx;
  if (obj.contains("n_per_group")) r.n_per_group = obj["n_per_group"].get<std::vector<int>>();
  r.tie_correction = obj.value("tie_correction", 1.0);
  return r;
}

json summary_row_to_json(const ModelSummaryRow& row) {
  return json{{"model", row.core.model_id},
              {"score", row.core.mean_score},
              {"mad", row.core.mad},
              {"stability", row.core.stability_rate},
              {"sem_sim", row.core.mean_semantic_similarity},
              {"score_baseline", row.score_baseline},
              {"mean_step_score", row.mean_step_score},
              {"n_records", row.n_records}};
}

}  // namespace

std::string analysis_to_json_text(const AnalysisResult& result) {
  json doc;
  doc["schema_version"] = "1";
  doc["sample_kind"] = result.sample_kind == SampleKind::deltas ? "deltas" : "scores";

  json summary = json::array();
  for (const ModelSummaryRow& row : result.summary) summary.push_back(summary_row_to_json(row));
  doc["model_summary"] = summary;

  doc["heatmap_delta"] = heatmap_to_json(result.heatmap_delta);
  doc["heatmap_semsim"] = heatmap_to_json(result.heatmap_semsim);

  json distributions = json::array();
  for (const DistributionSummary& d : result.distributions) {
    distributions.push_back(json{{"relation", d.relation},
                                 {"model", d.model_id},
                                 {"n", d.n},
                                 {"median", d.median},
                                 {"q1", d.q1},
                                 {"q3", d.q3},
                                 {"whisker_low", d.whisker_low},
                                 {"whisker_high", d.whisker_high},
                                 {"outliers", d.outliers}});
  }
  doc["distributions"] = distributions;

  json pairwise = json::array();
  for (const PairwiseTest& t : result.significance.pairwise) {
    pairwise.push_back(json{{"model_a", t.model_a},
                            {"model_b", t.model_b},
                            {"test", test_result_to_json(t.result)}});
  }
  json significant = json::array();
  for (const PairwiseTest& t : result.significance.significant) {
    significant.push_back(json{{"model_a", t.model_a},
                               {"model_b", t.model_b},
                               {"p_value", t.result.p_value}});
  }
  json within = json::array();
  for (const WithinModelTest& w : result.significance.within_model) {
    json obj{{"model", w.model_id}};
    if (w.result) obj["test"] = test_result_to_json(*w.result);
    if (!w.error.empty()) obj["error"] = w.error;
    within.push_back(obj);
  }
  doc["significance"] =
      json{{"pairwise", pairwise}, {"significant", significant}, {"within_model", within}};

  return doc.dump(2) + "\n";
}

AnalysisResult analysis_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw AnalysisError(std::string("malformed analysis document: ") + e.what());
  }
  AnalysisResult result;
  result.sample_kind =
      doc.value("sample_kind", "deltas") == std::string("scores") ? SampleKind::scores
                                                                  : SampleKind::deltas;
  for (const json& obj : doc.at("model_summary")) {
    ModelSummaryRow row;
    row.core.model_id = obj.at("model").get<std::string>();
    row.core.mean_score = obj.value("score", 0.0);
    row.core.mad = obj.value("mad", 0.0);
    row.core.stability_rate = obj.value("stability", 0.0);
    row.core.mean_semantic_similarity = obj.value("sem_sim", 0.0);
    row.score_baseline = obj.value("score_baseline", 0.0);
    row.mean_step_score = obj.value("mean_step_score", 0.0);
    row.n_records = obj.value("n_records", size_t{0});
    result.summary.push_back(std::move(row));
  }
  result.heatmap_delta = heatmap_from_json(doc.at("heatmap_delta"));
  result.heatmap_semsim = heatmap_from_json(doc.at("heatmap_semsim"));
  for (const json& obj : doc.at("distributions")) {
    DistributionSummary d;
    d.relation = obj.at("relation").get<std::string>();
    d.model_id = obj.at("model").get<std::string>();
    d.n = obj.value("n", size_t{0});
    d.median = obj.value("median", 0.0);
    d.q1 = obj.value("q1", 0.0);
    d.q3 = obj.value("q3", 0.0);
    d.whisker_low = obj.value("whisker_low", 0.0);
    d.whisker_high = obj.value("whisker_high", 0.0);
    if (obj.contains("outliers")) d.outliers = obj["outliers"].get<std::vector<double>>();
    result.distributions.push_back(std::move(d));
  }
  if (doc.contains("significance")) {
    const json& sig = doc["significance"];
    for (const json& obj : sig.value("pairwise", json::array())) {
      PairwiseTest t;
      t.model_a = obj.at("model_a").get<std::string>();
      t.model_b = obj.at("model_b").get<std::string>();
      t.result = test_result_from_json(obj.at("test"));
      result.significance.pairwise.push_back(std::move(t));
    }
    for (const PairwiseTest& t : result.significance.pairwise) {
      if (t.result.p_value < 0.05) result.significance.significant.push_back(t);
    }
    for (const json& obj : sig.value("within_model", json::array())) {
      WithinModelTest w;
      w.model_id = obj.at("model").get<std::string>();
      if (obj.contains("test")) w.result = test_result_from_json(obj["test"]);
      w.error = obj.value("error", "");
      result.significance.within_model.push_back(std::move(w));
    }
  }
  return result;
}

std::string render_model_summary_csv(const AnalysisResult& result) {
  std::string csv = "model,score,mad,stability,sem_sim\n";
  for (const ModelSummaryRow& row : result.summary) {
    csv += row.core.model_id + "," + format6(row.core.mean_score) + "," +
           format6(row.core.mad) + "," + format6(row.core.stability_rate) + "," +
           format6(row.core.mean_semantic_similarity) + "\n";
  }
  return csv;
}

namespace {

std::string render_heatmap_csv(const HeatmapMatrix& m) {
  std::string csv = "relation";
  for (const std::string& model : m.models) csv += "," + model;
  csv += "\n";
  for (size_t i = 0; i < m.relations.size(); ++i) {
    csv += m.relations[i];
    for (size_t j = 0; j < m.models.size(); ++j) {
      csv += ",";
      csv += m.counts[i][j] == 0 ? "NA" : format6(m.values[i][j]);
    }
    csv += "\n";
  }
  return csv;
}

std::string render_significance_csv(const SignificanceTable& table) {
  std::string csv = "model_a,model_b,p_value\n";
  for (const PairwiseTest& t : table.pairwise) {
    csv += t.model_a + "," + t.model_b + "," + format6(t.result.p_value) + "\n";
  }
  return csv;
}

std::string render_model_summary_md(const AnalysisResult& result) {
  std::string md = "| Model | Score | MAD | Stability | Sem. Sim. |\n";
  md += "|---|---|---|---|---|\n";
  for (const ModelSummaryRow& row : result.summary) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "| %s | %.3f | %.3f | %s | %.3f |\n",
                  row.core.model_id.c_str(), row.core.mean_score, row.core.mad,
                  format_percent(row.core.stability_rate).c_str(),
                  row.core.mean_semantic_similarity);
    md += buf;
  }
  return md;
}

std::string render_significance_md(const SignificanceTable& table) {
  std::string md = "## Significant pairwise differences (Mann-Whitney U, p < 0.05)\n\n";
  if (table.significant.empty()) {
    md += "No pair reached significance.\n";
  } else {
    md += "| Model A | Model B | p-value |\n|---|---|---|\n";
    for (const PairwiseTest& t : table.significant) {
      md += "| " + t.model_a + " | " + t.model_b + " | " + format6(t.result.p_value) + " |\n";
    }
  }
  md += "\n## All pairwise tests\n\n| Model A | Model B | U | p-value | method |\n";
  md += "|---|---|---|---|---|\n";
  for (const PairwiseTest& t : table.pairwise) {
    md += "| " + t.model_a + " | " + t.model_b + " | " + format6(t.result.statistic) + " | " +
          format6(t.result.p_value) + " | " + test_method_to_string(t.result.method) + " |\n";
  }
  md += "\n## Within-model relation effects (Kruskal-Wallis)\n\n";
  md += "| Model | H | p-value | note |\n|---|---|---|---|\n";
  for (const WithinModelTest& w : table.within_model) {
    if (w.result) {
      md += "| " + w.model_id + " | " + format6(w.result->statistic) + " | " +
            format6(w.result->p_value) + " |  |\n";
    } else {
      md += "| " + w.model_id + " | - | - | " + w.error + " |\n";
    }
  }
  return md;
}

}  // namespace

std::string render_markdown_report(const AnalysisResult& result) {
  std::string md = "# Robustness report\n\n## Model summary\n\n";
  md += render_model_summary_md(result);
  md += "\n";
  md += render_significance_md(result.significance);
  return md;
}

void write_reports(const AnalysisResult& result, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw AnalysisError("cannot create output dir \"" + out_dir + "\": " + ec.message());
  const fs::path dir(out_dir);

  write_text_file(dir / "model_summary.csv", render_model_summary_csv(result));
  write_text_file(dir / "model_summary.md", render_model_summary_md(result));
  {
    json rows = json::array();
    for (const ModelSummaryRow& row : result.summary) rows.push_back(summary_row_to_json(row));
    write_text_file(dir / "model_summary.json", rows.dump(2) + "\n");
  }
  write_text_file(dir / "heatmap_delta.csv", render_heatmap_csv(result.heatmap_delta));
  write_text_file(dir / "heatmap_semsim.csv", render_heatmap_csv(result.heatmap_semsim));
  {
    json distributions = json::array();
    for (const DistributionSummary& d : result.distributions) {
      distributions.push_back(json{{"relation", d.relation},
                                   {"model", d.model_id},
                                   {"n", d.n},
                                   {"median", d.median},
                                   {"q1", d.q1},
                                   {"q3", d.q3},
                                   {"whisker_low", d.whisker_low},
                                   {"whisker_high", d.whisker_high},
                                   {"outliers", d.outliers}});
    }
    write_text_file(dir / "distributions.json", distributions.dump(2) + "\n");
  }
  write_text_file(dir / "significance.csv", render_significance_csv(result.significance));
  write_text_file(dir / "significance.md", render_significance_md(result.significance));
  write_text_file(dir / "analysis.json", analysis_to_json_text(result));
}

}  // namespace seminv
