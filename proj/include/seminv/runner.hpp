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

#ifndef SEMINV_RUNNER_HPP
#define SEMINV_RUNNER_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seminv/agent.hpp"
#include "seminv/corpus.hpp"
#include "seminv/embed.hpp"
#include "seminv/store.hpp"
#include "seminv/transform.hpp"

namespace seminv {

class RunnerError : public std::runtime_error {
 public:
  explicit RunnerError(const std::string& what) : std::runtime_error(what) {}
};

enum class TransformSource { cache_file, generate_rule, generate_llm };

std::string transform_source_to_string(TransformSource s);
TransformSource transform_source_from_string(const std::string& s);

struct EmbeddingSettings {
  std::string provider = "local";  // "local" | "remote"
  size_t dimension = 384;
  std::string endpoint_url;        // remote only
  std::string model = "sentence-transformers/all-MiniLM-L6-v2";
  std::string api_key_ref;
  std::string cache_path;          // default: <output_dir>/embed_cache.json
};

struct CampaignConfig {
  std::string corpus_path;
  std::vector<AgentConfig> models;
  std::vector<Relation> relations;  // identity is implicitly included
  TransformSource transform_source = TransformSource::generate_rule;
  std::string transform_cache_path;           // required for cache_file
  std::optional<AgentConfig> generator;       // required for generate_llm
  EmbeddingSettings embedding;
  std::string output_dir;
  int max_in_flight = 4;  // per endpoint
  uint64_t seed = 0;

  // Requested relations plus identity, in canonical relation order.
  std::vector<Relation> effective_relations() const;
  void validate() const;
};

CampaignConfig load_campaign_config(const std::string& path);

// One planned inference. Baseline cells use relation "baseline" and always
// run before the transformation cells that depend on them.
struct PlannedCell {
  std::string model_id;
  std::string problem_id;
  std::string relation;
};

struct CampaignPlan {
  std::vector<PlannedCell> baselines;  // model x problem
  std::vector<PlannedCell> cells;      // model x problem x relation, seed-shuffled
};

// Deterministic given (config, corpus): |cells| = models x problems x
// effective relations. Throws on an empty model or relation set.
CampaignPlan plan_campaign(const CampaignConfig& cfg, const Corpus& corpus);

struct CampaignSummary {
  size_t planned = 0;    // baselines + cells
  size_t completed = 0;  // executed successfully this run
  size_t skipped = 0;    // already complete in the store
  size_t failed = 0;     // executed and recorded as failed this run
  size_t stopped = 0;    // not attempted because a stop was requested
};

struct RunHooks {
  // Overrides agent construction (tests inject instrumented agents). The
  // default understands "mock:reference-echo" endpoints and builds HttpAgent
  // otherwise.
  std::function<std::shared_ptr<Agent>(const AgentConfig&)> agent_factory;
  // Consulted between cells; returning true stops the campaign gracefully
  // (mid-run kill for resumability testing, SIGINT handling in the CLI).
  std::function<bool()> should_stop;
};

// Executes the campaign: ensures transformed texts, runs baselines first,
// then all transformation cells with at most max_in_flight concurrent
// requests per endpoint. Already-complete keys are skipped; failures are
// recorded in the store, never fatal to other cells.
CampaignSummary run_campaign(const CampaignConfig& cfg, const RunHooks& hooks = {});

//

// Solution score of the stored baseline inference for (model, problem).
// Throws when the baseline record is missing or failed.
double baseline_for(const std::string& model_id, const std::string& problem_id,
                    const std::vector<RunRecord>& store_records);

// Default agent construction ("mock:reference-echo" / "mock:transform" /
// HTTP endpoints).
std::shared_ptr<Agent> make_agent(const AgentConfig& cfg, const Corpus& corpus);

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& settings);

// Stable per-cell seed for rule transforms, derived from the campaign seed.
uint64_t derive_seed(uint64_t campaign_seed, const std::string& problem_id,
                     const std::string& relation);

std::string now_iso8601_utc();

}  // namespace seminv

#endif  // SEMINV_RUNNER_HPP
