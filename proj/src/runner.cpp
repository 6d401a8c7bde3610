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

#include "seminv/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "seminv/metrics.hpp"
#include "seminv/sha256.hpp"

namespace seminv {

using nlohmann::json;
namespace fs = std::filesystem;

std::string transform_source_to_string(TransformSource s) {
  switch (s) {
    case TransformSource::cache_file: return "cache-file";
    case TransformSource::generate_rule: return "generate-rule";
    case TransformSource::generate_llm: return "generate-llm";
  }
  throw RunnerError("invalid transform source value");
}

TransformSource transform_source_from_string(const std::string& s) {
  if (s == "cache-file") return TransformSource::cache_file;
  if (s == "generate-rule") return TransformSource::generate_rule;
  if (s == "generate-llm") return TransformSource::generate_llm;
  throw RunnerError("unknown transform source \"" + s + "\"");
}

std::vector<Relation> CampaignConfig::effective_relations() const {
  std::set<Relation> requested(relations.begin(), relations.end());
  requested.insert(Relation::identity);  // baseline requirement
  std::vector<Relation> out;
  for (Relation r : all_relations()) {
    if (requested.count(r)) out.push_back(r);
  }
  return out;
}

void CampaignConfig::validate() const {
  if (corpus_path.empty()) throw RunnerError("campaign config: corpus path required");
  if (output_dir.empty()) throw RunnerError("campaign config: output_dir required");
  if (models.empty()) throw RunnerError("campaign config: at least one model required");
  if (relations.empty()) throw RunnerError("campaign config: empty relation set");
  if (max_in_flight < 1) throw RunnerError("campaign config: max_in_flight must be >= 1");
  for (const AgentConfig& m : models) m.validate();
  if (transform_source == TransformSource::cache_file && transform_cache_path.empty()) {
    throw RunnerError("campaign config: transform_source=cache-file requires transform_cache");
  }
  if (transform_source == TransformSource::generate_llm && !generator) {
    throw RunnerError("campaign config: transform_source=generate-llm requires a generator");
  }
  if (embedding.provider != "local" && embedding.provider != "remote") {
    throw RunnerError("campaign config: embedding.provider must be \"local\" or \"remote\"");
  }
  if (embedding.provider == "remote" && embedding.endpoint_url.empty()) {
    throw RunnerError("campaign config: remote embedding provider requires endpoint_url");
  }
}

namespace {

AgentConfig agent_config_from_json(const json& obj) {
  AgentConfig cfg;
  cfg.model_id = obj.at("model_id").get<std::string>();
  cfg.endpoint_url = obj.at("endpoint_url").get<std::string>();
  cfg.api_key_ref = obj.value("api_key_ref", "");
  cfg.temperature = obj.value("temperature", 0.7);
  cfg.top_p = obj.value("top_p", 0.95);
  cfg.max_tokens = obj.value("max_tokens", 1024);
  cfg.request_timeout_s = obj.value("request_timeout_s", 120);
  cfg.max_retries = obj.value("max_retries", 3);
  cfg.retry_base_ms = obj.value("retry_base_ms", 1000);
  return cfg;
}

}  // namespace

CampaignConfig load_campaign_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunnerError("cannot open campaign config \"" + path + "\"");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw RunnerError(std::string("malformed campaign config: ") + e.what());
  }

  CampaignConfig cfg;
  try {
    cfg.corpus_path = doc.at("corpus").get<std::string>();
    cfg.output_dir = doc.at("output_dir").get<std::string>();
    for (const json& m : doc.at("models")) cfg.models.push_back(agent_config_from_json(m));
    if (doc.contains("relations")) {
      for (const json& r : doc["relations"]) {
        cfg.relations.push_back(relation_from_string(r.get<std::string>()));
      }
    } else {
      cfg.relations = all_relations();
    }
    if (doc.contains("transform_source")) {
      cfg.transform_source =
          transform_source_from_string(doc["transform_source"].get<std::string>());
    }
    cfg.transform_cache_path = doc.value("transform_cache", "");
    if (doc.contains("generator")) cfg.generator = agent_config_from_json(doc["generator"]);
    if (doc.contains("embedding")) {
      const json& e = doc["embedding"];
      cfg.embedding.provider = e.value("provider", "local");
      cfg.embedding.dimension = e.value("dimension", size_t{384});
      cfg.embedding.endpoint_url = e.value("endpoint_url", "");
      cfg.embedding.model = e.value("model", cfg.embedding.model);
      cfg.embedding.api_key_ref = e.value("api_key_ref", "");
      cfg.embedding.cache_path = e.value("cache_path", "");
    }
    cfg.max_in_flight = doc.value("max_in_flight", 4);
    cfg.seed = doc.value("seed", uint64_t{0});
  } catch (const json::exception& e) {
    throw RunnerError(std::string("campaign config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

CampaignPlan plan_campaign(const CampaignConfig& cfg, const Corpus& corpus) {
  if (cfg.models.empty()) throw RunnerError("plan_campaign: at least one model required");
  if (cfg.relations.empty()) throw RunnerError("plan_campaign: empty relation set");

  CampaignPlan plan;
  const std::vector<Relation> relations = cfg.effective_relations();
  for (const AgentConfig& model : cfg.models) {
    for (const Problem& p : corpus.problems) {
      plan.baselines.push_back({model.model_id, p.id, "baseline"});
      for (Relation r : relations) {
        plan.cells.push_back({model.model_id, p.id, relation_to_string(r)});
      }
    }
  }
  // Seeded shuffle spreads models/problems across the run; baselines keep
  // their natural order and always execute first.
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(plan.cells.begin(), plan.cells.end(), rng);
  return plan;
}

uint64_t derive_seed(uint64_t campaign_seed, const std::string& problem_id,
                     const std::string& relation) {
  std::string digest =
      sha256_hex(std::to_string(campaign_seed) + "|" + problem_id + "|" + relation);
  // First 16 hex digits as a 64-bit value; stable across platforms.
  return std::stoull(digest.substr(0, 16), nullptr, 16);
}

std::string now_iso8601_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::shared_ptr<Agent> make_agent(const AgentConfig& cfg, const Corpus& corpus) {
  if (cfg.endpoint_url == "mock:reference-echo") {
    return std::make_shared<MockAgent>(MockAgent::reference_echo(cfg.model_id, corpus));
  }
  if (cfg.endpoint_url == "mock:transform") {
    return std::make_shared<MockTransformAgent>(cfg.model_id);
  }
  return std::make_shared<HttpAgent>(cfg);
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& settings) {
  if (settings.provider == "local") {
    return std::make_unique<HashedBagProvider>(settings.dimension);
  }
  RemoteEmbeddingConfig cfg;
  cfg.endpoint_url = settings.endpoint_url;
  cfg.model = settings.model;
  cfg.api_key_ref = settings.api_key_ref;
  cfg.dimension = settings.dimension;
  return std::make_unique<RemoteEmbeddingProvider>(cfg);
}

double baseline_for(const std::string& model_id, const std::string& problem_id,
                    const std::vector<RunRecord>& store_records) {
  const std::string key = run_key(model_id, problem_id, "baseline");
  for (const RunRecord& r : store_records) {
    if (r.key() != key) continue;
    if (r.status != RunStatus::complete) {
      throw RunnerError("baseline record for " + key + " is failed: " + r.error);
    }
    return r.eval.solution_score;
  }
  throw RunnerError("missing baseline record for (" + model_id + ", " + problem_id +
                    "); run the baseline/identity phase first");
}

namespace {

class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return count_ > 0; });
    --count_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int count_;
};

struct SemaphoreGuard {
  explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  Semaphore& sem;
};

// Runs fn(i) for i in [0, n) on a bounded worker pool. fn must not throw.
void parallel_run(size_t n, size_t n_threads, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  n_threads = std::max<size_t>(1, std::min(n_threads, n));
  if (n_threads == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (size_t t = 0; t < n_threads; ++t) {
    workers.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (std::thread& w : workers) w.join();
}

struct TransformOutcome {
  std::optional<TransformedProblem> variant;
  std::string error;
};

}  // namespace

CampaignSummary run_campaign(const CampaignConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  Corpus corpus = load_corpus(cfg.corpus_path);

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw RunnerError("cannot create output_dir \"" + cfg.output_dir + "\": " + ec.message());
  }
  {
    // Fail early on an unwritable output directory.
    std::ofstream probe(fs::path(cfg.output_dir) / ".write_probe", std::ios::trunc);
    if (!probe) throw RunnerError("output_dir \"" + cfg.output_dir + "\" is not writable");
    probe.close();
    fs::remove(fs::path(cfg.output_dir) / ".write_probe", ec);
  }

  CampaignPlan plan = plan_campaign(cfg, corpus);
  const std::string store_path = (fs::path(cfg.output_dir) / "records.jsonl").string();
  RunStore store(store_path);

  // Resume state: completed keys are skipped; baseline records feed deltas.
  std::unordered_map<std::string, RunRecord> complete_records;
  for (const RunRecord& r : RunStore::load(store_path)) {
    if (r.status == RunStatus::complete) complete_records.emplace(r.key(), r);
  }

  std::unique_ptr<EmbeddingProvider> provider = make_embedding_provider(cfg.embedding);
  auto cache = std::make_shared<EmbeddingCache>();
  const std::string cache_path =
      cfg.embedding.cache_path.empty()
          ? (fs::path(cfg.output_dir) / "embed_cache.json").string()
          : cfg.embedding.cache_path;
  cache->load(cache_path);
  provider->set_cache(cache);

  auto agent_factory = hooks.agent_factory
                           ? hooks.agent_factory
                           : [&corpus](const AgentConfig& c) { return make_agent(c, corpus); };
  std::unordered_map<std::string, std::shared_ptr<Agent>> agents;
  std::unordered_map<std::string, std::unique_ptr<Semaphore>> endpoint_limits;
  for (const AgentConfig& m : cfg.models) {
    agents[m.model_id] = agent_factory(m);
    if (!endpoint_limits.count(m.endpoint_url)) {
      endpoint_limits[m.endpoint_url] = std::make_unique<Semaphore>(cfg.max_in_flight);
    }
  }
  std::unordered_map<std::string, Semaphore*> model_limit;
  for (const AgentConfig& m : cfg.models) {
    model_limit[m.model_id] = endpoint_limits[m.endpoint_url].get();
  }

  auto stop_requested = [&] { return hooks.should_stop && hooks.should_stop(); };

  CampaignSummary summary;
  summary.planned = plan.baselines.size() + plan.cells.size();
  std::mutex state_mu;  // guards complete_records and summary counters

  // --- Transform phase: one variant per (problem, relation), shared by all
  // models. Generation is skipped for pairs whose dependent cells are all
  // already complete.
  const std::vector<Relation> relations = cfg.effective_relations();
  std::optional<TransformCache> file_cache;
  if (cfg.transform_source == TransformSource::cache_file) {
    file_cache = TransformCache::load(cfg.transform_cache_path);
  }
  std::shared_ptr<Agent> generator;
  if (cfg.transform_source == TransformSource::generate_llm) {
    generator = agent_factory(*cfg.generator);
  }

  std::vector<std::pair<const Problem*, Relation>> pairs;
  for (const Problem& p : corpus.problems) {
    for (Relation r : relations) {
      bool all_done = true;
      for (const AgentConfig& m : cfg.models) {
        if (!complete_records.count(run_key(m.model_id, p.id, relation_to_string(r)))) {
          all_done = false;
          break;
        }
      }
      if (!all_done) pairs.emplace_back(&p, r);
    }
  }

  std::map<std::pair<std::string, std::string>, TransformOutcome> transforms;
  for (const auto& [p, r] : pairs) {
    transforms[{p->id, relation_to_string(r)}] = TransformOutcome{};
  }
  std::mutex transforms_mu;

  auto produce_transform = [&](const Problem& p, Relation r) -> TransformOutcome {
    TransformOutcome out;
    try {
      switch (cfg.transform_source) {
        case TransformSource::cache_file: {
          const TransformedProblem* v = file_cache->find(p.id, r);
          if (v == nullptr) {
            out.error = "transform cache has no entry for (" + p.id + ", " +
                        relation_to_string(r) + ")";
            return out;
          }
          if (!v->original_sha256.empty() && v->original_sha256 != sha256_hex(p.statement)) {
            out.error = "transform cache mismatch: statement of \"" + p.id +
                        "\" changed since the cache was generated";
            return out;
          }
          out.variant = *v;
          return out;
        }
        case TransformSource::generate_rule:
          if (!rule_capable(r)) {
            out.error = "relation \"" + relation_to_string(r) +
                        "\" is not rule-capable; use generate-llm or a cache file";
            return out;
          }
          out.variant =
              apply_rule_transform(r, p, derive_seed(cfg.seed, p.id, relation_to_string(r)));
          return out;
        case TransformSource::generate_llm:
          if (llm_capable(r)) {
            out.variant = generate_llm_transform(r, p, *generator);
          } else {
            out.variant =
                apply_rule_transform(r, p, derive_seed(cfg.seed, p.id, relation_to_string(r)));
          }
          return out;
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  };

  parallel_run(pairs.size(), static_cast<size_t>(cfg.max_in_flight), [&](size_t i) {
    if (stop_requested()) return;
    const auto& [p, r] = pairs[i];
    TransformOutcome outcome = produce_transform(*p, r);
    std::lock_guard<std::mutex> lock(transforms_mu);
    transforms[{p->id, relation_to_string(r)}] = std::move(outcome);
  });

  // Audit copy of the variants used this run.
  {
    TransformCache audit;
    for (const auto& [key, outcome] : transforms) {
      if (outcome.variant) audit.put(*outcome.variant);
    }
    if (audit.size() > 0) {
      audit.save((fs::path(cfg.output_dir) / "transforms.json").string());
    }
  }

  auto find_problem = [&](const std::string& id) -> const Problem& {
    const Problem* p = corpus.find(id);
    if (p == nullptr) throw RunnerError("plan references unknown problem \"" + id + "\"");
    return *p;
  };

  auto record_failure = [&](const PlannedCell& cell, const std::string& text,
                            const std::string& error, int attempts) {
    RunRecord rec;
    rec.eval.model_id = cell.model_id;
    rec.eval.problem_id = cell.problem_id;
    rec.eval.relation = cell.relation;
    rec.eval.timestamp = now_iso8601_utc();
    rec.eval.response_ref = cell.model_id + "/" + cell.problem_id + "/" + cell.relation;
    rec.transformed_text = text;
    rec.status = RunStatus::failed;
    rec.error = error;
    rec.attempts = attempts;
    store.append(rec);
    std::lock_guard<std::mutex> lock(state_mu);
    ++summary.failed;
  };

  // --- Baseline phase: one untransformed inference per (model, problem).
  auto run_baseline = [&](size_t i) {
    const PlannedCell& cell = plan.baselines[i];
    {
      std::lock_guard<std::mutex> lock(state_mu);
      if (complete_records.count(run_key(cell.model_id, cell.problem_id, cell.relation))) {
        ++summary.skipped;
        return;
      }
    }
    if (stop_requested()) {
      std::lock_guard<std::mutex> lock(state_mu);
      ++summary.stopped;
      return;
    }
    const Problem& problem = find_problem(cell.problem_id);
    try {
      AgentResponse response;
      {
        SemaphoreGuard guard(*model_limit.at(cell.model_id));
        response = agents.at(cell.model_id)->solve(problem.statement, problem.id);
      }
      double score = solution_score(response.raw_text, reference_text(problem), *provider);
      StepScores steps = step_scores(response.steps, problem.reference_steps, *provider);

      RunRecord rec;
      // The baseline is its own reference point: delta 0, trace self-similar.
      rec.eval = make_evaluation_record(cell.model_id, cell.problem_id, cell.relation, score,
                                        score, steps.average, 1.0);
      rec.eval.timestamp = now_iso8601_utc();
      rec.eval.response_ref = run_key(cell.model_id, cell.problem_id, cell.relation);
      rec.raw_response = response.raw_text;
      rec.transformed_text = problem.statement;
      rec.status = RunStatus::complete;
      rec.attempts = 1;
      rec.latency_ms = response.latency_ms;
      store.append(rec);
      std::lock_guard<std::mutex> lock(state_mu);
      complete_records.emplace(rec.key(), rec);
      ++summary.completed;
    } catch (const std::exception& e) {
      record_failure(cell, problem.statement, e.what(), 1);
    }
  };

  const size_t pool =
      static_cast<size_t>(cfg.max_in_flight) * std::max<size_t>(1, endpoint_limits.size());
  parallel_run(plan.baselines.size(), std::min<size_t>(pool, 32), run_baseline);

  // --- Transformation cells.
  auto run_cell = [&](size_t i) {
    const PlannedCell& cell = plan.cells[i];
    {
      std::lock_guard<std::mutex> lock(state_mu);
      if (complete_records.count(run_key(cell.model_id, cell.problem_id, cell.relation))) {
        ++summary.skipped;
        return;
      }
    }
    if (stop_requested()) {
      std::lock_guard<std::mutex> lock(state_mu);
      ++summary.stopped;
      return;
    }
    const Problem& problem = find_problem(cell.problem_id);

    TransformOutcome outcome;
    {
      std::lock_guard<std::mutex> lock(transforms_mu);
      auto it = transforms.find({cell.problem_id, cell.relation});
      if (it != transforms.end()) outcome = it->second;
    }
    if (!outcome.variant) {
      record_failure(cell, "",
                     outcome.error.empty() ? "transformed text unavailable" : outcome.error, 0);
      return;
    }

    RunRecord baseline;
    bool have_baseline = false;
    {
      std::lock_guard<std::mutex> lock(state_mu);
      auto it = complete_records.find(run_key(cell.model_id, cell.problem_id, "baseline"));
      if (it != complete_records.end()) {
        baseline = it->second;
        have_baseline = true;
      }
    }
    if (!have_baseline) {
      record_failure(cell, outcome.variant->text,
                     "missing baseline record for (" + cell.model_id + ", " + cell.problem_id +
                         "); run the baseline/identity phase first",
                     0);
      return;
    }

    try {
      AgentResponse response;
      {
        SemaphoreGuard guard(*model_limit.at(cell.model_id));
        response = agents.at(cell.model_id)->solve(outcome.variant->text, problem.id);
      }
      double score = solution_score(response.raw_text, reference_text(problem), *provider);
      StepScores steps = step_scores(response.steps, problem.reference_steps, *provider);
      std::vector<std::string> baseline_trace = parse_response(baseline.raw_response).steps;
      double trace_sim = trace_similarity(baseline_trace, response.steps, *provider);

      RunRecord rec;
      rec.eval = make_evaluation_record(cell.model_id, cell.problem_id, cell.relation, score,
                                        baseline.eval.solution_score, steps.average, trace_sim);
      rec.eval.timestamp = now_iso8601_utc();
      rec.eval.response_ref = run_key(cell.model_id, cell.problem_id, cell.relation);
      rec.raw_response = response.raw_text;
      rec.transformed_text = outcome.variant->text;
      rec.status = RunStatus::complete;
      rec.attempts = 1;
      rec.latency_ms = response.latency_ms;
      store.append(rec);
      std::lock_guard<std::mutex> lock(state_mu);
      complete_records.emplace(rec.key(), rec);
      ++summary.completed;
    } catch (const std::exception& e) {
      record_failure(cell, outcome.variant->text, e.what(), 1);
    }
  };

  parallel_run(plan.cells.size(), std::min<size_t>(pool, 32), run_cell);

  cache->save(cache_path);
  return summary;
}

}  // namespace seminv
