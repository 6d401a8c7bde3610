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

#ifndef SEMINV_AGENT_HPP
#define SEMINV_AGENT_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seminv/corpus.hpp"

namespace seminv {

class AgentError : public std::runtime_error {
 public:
  explicit AgentError(const std::string& what) : std::runtime_error(what) {}
};

struct AgentConfig {
  std::string model_id;
  std::string endpoint_url;  // full chat-completions URL, or a mock: scheme
  std::string api_key_ref;   // env var holding the API key; empty = no auth
  double temperature = 0.7;
  double top_p = 0.95;
  int max_tokens = 1024;
  int request_timeout_s = 120;
  int max_retries = 3;        // retried attempts after the first
  int retry_base_ms = 1000;   // exponential backoff base (factor 2, jitter)

  void validate() const;  // throws AgentError on out-of-range sampling fields
};

struct AgentResponse {
  std::string raw_text;      // unmodified completion
  std::string final_answer;  // parsed; falls back to the last step
  std::vector<std::string> steps;  // parsed reasoning trace, never empty
  long latency_ms = 0;
  std::optional<std::pair<int, int>> token_counts;  // (prompt, completion)
  std::string model_id;
};

// The step-by-step solving prompt. Throws on empty problem text.
std::string build_prompt(const std::string& problem_text);

struct ParsedResponse {
  std::string final_answer;
  std::vector<std::string> steps;
};

// Deterministic completion parsing. Steps split on numbered markers
// ("Step N", "N.", "N)") at line starts, else on blank-line paragraphs, else
// the whole text as one step. The final answer is the text after the last
// case-insensitive "final answer" / "answer:" marker; the section before the
// marker is what gets step-split. Fallback answer: the last step. Pure and
// total on non-empty input; the answer is always a (trimmed) substring of
// the raw text.
ParsedResponse parse_response(const std::string& raw);

// A reasoning agent reachable through some transport. Implementations must be
// safe for concurrent solve() calls.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual const std::string& model_id() const = 0;

  // Sends `prompt` as a single user message, returns the raw completion.
  virtual std::string complete(const std::string& prompt) = 0;

  // build_prompt + complete + parse_response, with latency measured. The
  // problem_id is an out-of-band hint for mock agents; HTTP agents ignore it.
  virtual AgentResponse solve(const std::string& problem_text,
                              const std::string& problem_id = {});
};

// Chat-completions client (OpenAI-compatible wire format): single user
// message plus temperature/top_p/max_tokens. Exactly one sampled completion
// per call; retries (with exponential backoff and jitter) happen only on
// transport errors, HTTP 5xx, and 429 — never on a successful completion.
class HttpAgent : public Agent {
 public:
  explicit HttpAgent(AgentConfig config);

  const std::string& model_id() const override { return config_.model_id; }
  const AgentConfig& config() const { return config_; }

  std::string complete(const std::string& prompt) override;
  AgentResponse solve(const std::string& problem_text,
                      const std::string& problem_id = {}) override;

 private:
  struct Completion {
    std::string text;
    std::optional<std::pair<int, int>> token_counts;
  };
  Completion complete_with_usage(const std::string& prompt);

  AgentConfig config_;
};

// Deterministic offline agent for tests and dry runs. Two modes:
//  - table: prompt -> completion lookup (exact match);
//  - reference-echo: replays the referenced problem's reference solution,
//    regardless of how the problem statement was transformed.
class MockAgent : public Agent {
 public:
  static MockAgent with_table(std::string model_id,
                              std::map<std::string, std::string> prompt_to_completion);
  static MockAgent reference_echo(std::string model_id, Corpus corpus);

  const std::string& model_id() const override { return model_id_; }

  std::string complete(const std::string& prompt) override;
  AgentResponse solve(const std::string& problem_text,
                      const std::string& problem_id = {}) override;

 private:
  MockAgent() = default;

  std::string model_id_;
  bool echo_mode_ = false;
  std::map<std::string, std::string> table_;
  Corpus corpus_;
};

}  // namespace seminv

#endif  // SEMINV_AGENT_HPP
