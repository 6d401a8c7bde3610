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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seminv/analysis.hpp"
#include "seminv/corpus.hpp"
#include "seminv/runner.hpp"
#include "seminv/store.hpp"
#include "seminv/transform.hpp"

namespace {

using namespace seminv;

int cmd_validate_corpus(const std::string& path) {
  Corpus corpus = load_corpus(path);
  CorpusStats stats = corpus_stats(corpus);
  std::printf("corpus \"%s\": %d problems (schema %s)\n", path.c_str(), stats.total,
              corpus.schema_version.c_str());
  std::printf("  by category:\n");
  for (Category c : all_categories()) {
    std::printf("    %-13s %d\n", category_to_string(c).c_str(), stats.per_category.at(c));
  }
  std::printf("  by difficulty:\n");
  for (Difficulty d : all_difficulties()) {
    std::printf("    %-13s %d\n", difficulty_to_string(d).c_str(), stats.per_difficulty.at(d));
  }
  size_t warnings = 0;
  for (const Problem& p : corpus.problems) {
    for (const std::string& w : validate_problem(p).warnings) {
      std::printf("  warning: %s\n", w.c_str());
      ++warnings;
    }
  }
  std::printf("ok (%zu warning%s)\n", warnings, warnings == 1 ? "" : "s");
  return 0;
}

int cmd_transform(const std::string& corpus_path, std::vector<std::string> relation_names,
                  const std::string& method_name, const std::string& out_path, uint64_t seed,
                  const std::string& generator_endpoint, const std::string& generator_model,
                  const std::string& generator_key_env) {
  Corpus corpus = load_corpus(corpus_path);
  TransformMethod method = transform_method_from_string(method_name);

  std::vector<Relation> relations;
  if (relation_names.empty()) {
    relations = all_relations();
  } else {
    for (const std::string& name : relation_names) relations.push_back(relation_from_string(name));
  }

  if (method == TransformMethod::rule) {
    for (Relation r : relations) {
      if (!rule_capable(r)) {
        std::fprintf(stderr, "error: relation \"%s\" has no rule implementation; use --method llm\n",
                     relation_to_string(r).c_str());
        return 1;
      }
    }
  }

  std::shared_ptr<Agent> generator;
  if (method == TransformMethod::llm) {
    AgentConfig gen_cfg;
    gen_cfg.model_id = generator_model.empty() ? "mock-transformer" : generator_model;
    gen_cfg.endpoint_url = generator_endpoint.empty() ? "mock:transform" : generator_endpoint;
    gen_cfg.api_key_ref = generator_key_env;
    generator = make_agent(gen_cfg, corpus);
  }

  TransformCache cache;
  size_t failures = 0;
  for (const Problem& p : corpus.problems) {
    for (Relation r : relations) {
      try {
        if (method == TransformMethod::llm && llm_capable(r)) {
          cache.put(generate_llm_transform(r, p, *generator));
        } else {
          cache.put(apply_rule_transform(r, p, derive_seed(seed, p.id, relation_to_string(r))));
        }
      } catch (const std::exception& e) {
        std::fprintf(stderr, "  failed (%s, %s): %s\n", p.id.c_str(),
                     relation_to_string(r).c_str(), e.what());
        ++failures;
      }
    }
  }
  cache.save(out_path);
  std::printf("wrote %zu variants to %s (%zu failure%s)\n", cache.size(), out_path.c_str(),
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

int cmd_run(const std::string& config_path) {
  CampaignConfig cfg = load_campaign_config(config_path);
  CampaignSummary summary = run_campaign(cfg);
  std::printf("campaign: planned %zu, completed %zu, skipped %zu, failed %zu", summary.planned,
              summary.completed, summary.skipped, summary.failed);
  if (summary.stopped > 0) std::printf(", stopped %zu", summary.stopped);
  std::printf("\nstore: %s/records.jsonl\n", cfg.output_dir.c_str());
  return summary.failed == 0 ? 0 : 1;
}

int cmd_analyze(const std::string& store_path, const std::string& out_dir,
                const std::string& sample_name) {
  std::vector<RunRecord> records = RunStore::load(store_path);
  if (records.empty()) {
    std::fprintf(stderr, "error: store \"%s\" is empty or unreadable\n", store_path.c_str());
    return 1;
  }
  SampleKind sample = sample_name == "scores" ? SampleKind::scores : SampleKind::deltas;
  AnalysisResult result = analyze(records, sample);
  write_reports(result, out_dir);
  std::printf("analyzed %zu records -> %s\n", records.size(), out_dir.c_str());
  std::printf("  model_summary.{csv,json,md}, heatmap_delta.csv, heatmap_semsim.csv,\n"
              "  distributions.json, significance.{csv,md}, analysis.json\n");
  return 0;
}

int cmd_report(const std::string& dir, const std::string& format) {
  std::ifstream in(dir + "/analysis.json", std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: no analysis.json in \"%s\" (run analyze first)\n", dir.c_str());
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (format == "json") {
    std::cout << buf.str();
    return 0;
  }
  AnalysisResult result = analysis_from_json_text(buf.str());
  if (format == "csv") {
    std::cout << render_model_summary_csv(result);
  } else {
    std::cout << render_markdown_report(result);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metamorphic robustness harness for LLM reasoning agents"};
  app.require_subcommand(1);

  std::string corpus_path, out_path, config_path, store_path, dir;
  std::string method = "rule", format = "md", sample = "deltas";
  std::string generator_endpoint, generator_model, generator_key_env;
  std::vector<std::string> relations;
  uint64_t seed = 0;

  CLI::App* validate = app.add_subcommand("validate-corpus", "Load and validate a corpus file");
  validate->add_option("path", corpus_path, "corpus JSON file")->required();

  CLI::App* transform =
      app.add_subcommand("transform", "Generate transformed variants into a cache file");
  transform->add_option("corpus", corpus_path, "corpus JSON file")->required();
  transform->add_option("--relations", relations, "relations (default: all 8)")->delimiter(',');
  transform->add_option("--method", method, "rule|llm")->check(CLI::IsMember({"rule", "llm"}));
  transform->add_option("--out", out_path, "output cache file")->required();
  transform->add_option("--seed", seed, "seed for rule transforms");
  transform->add_option("--generator-endpoint", generator_endpoint,
                        "chat endpoint of the generator model (llm method; default offline mock)");
  transform->add_option("--generator-model", generator_model, "generator model id");
  transform->add_option("--generator-key-env", generator_key_env,
                        "env var holding the generator API key");

  CLI::App* run = app.add_subcommand("run", "Run a campaign from a config file");
  run->add_option("config", config_path, "campaign config JSON")->required();

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Aggregate a record store into reports");
  analyze_cmd->add_option("store", store_path, "records.jsonl store")->required();
  analyze_cmd->add_option("--out", dir, "output directory")->required();
  analyze_cmd->add_option("--sample", sample, "statistical sample: deltas|scores")
      ->check(CLI::IsMember({"deltas", "scores"}));

  CLI::App* report = app.add_subcommand("report", "Render reports from an analyze output dir");
  report->add_option("dir", dir, "analyze output directory")->required();
  report->add_option("--format", format, "csv|md|json")
      ->check(CLI::IsMember({"csv", "md", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate_corpus(corpus_path);
    if (transform->parsed()) {
      return cmd_transform(corpus_path, relations, method, out_path, seed, generator_endpoint,
                           generator_model, generator_key_env);
    }
    if (run->parsed()) return cmd_run(config_path);
    if (analyze_cmd->parsed()) return cmd_analyze(store_path, dir, sample);
    if (report->parsed()) return cmd_report(dir, format);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
