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

#include "seminv/agent.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include <json.hpp>

#include "seminv/http_util.hpp"
#include "seminv/text.hpp"

namespace seminv {

using nlohmann::json;

void AgentConfig::validate() const {
  if (model_id.empty()) throw AgentError("AgentConfig: model_id required");
  if (endpoint_url.empty()) throw AgentError("AgentConfig: endpoint_url required");
  if (temperature < 0.0) throw AgentError("AgentConfig: temperature must be >= 0");
  if (top_p <= 0.0 || top_p > 1.0) throw AgentError("AgentConfig: top_p must be in (0, 1]");
  if (max_tokens < 1) throw AgentError("AgentConfig: max_tokens must be >= 1");
}

std::string build_prompt(const std::string& problem_text) {
  if (trim(problem_text).empty()) throw AgentError("build_prompt: empty problem text");
  return "Solve the following problem step by step. Show your reasoning clearly before "
         "providing the final answer.\n\nProblem: " +
         problem_text;
}

namespace {

size_t find_last_ci(const std::string& haystack_lower, const std::string& needle) {
  return haystack_lower.rfind(needle);
}

// Leading separators between an answer marker and the answer itself.
size_t skip_separators(const std::string& s, size_t pos) {
  while (pos < s.size()) {
    char c = s[pos];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '-' || c == '*' ||
        c == '=') {
      ++pos;
    } else {
      break;
    }
  }
  return pos;
}

// Returns the length of a step marker at `pos` (start of a line), or 0.
// Recognized forms: "Step N" (optional ':'/'.'/')'), "N." and "N)" followed
// by whitespace or end of line.
size_t step_marker_length(const std::string& s, size_t pos) {
  size_t i = pos;
  auto lower = [&](size_t k) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(s[k])));
  };
  if (i + 4 <= s.size() && lower(i) == 's' && lower(i + 1) == 't' && lower(i + 2) == 'e' &&
      lower(i + 3) == 'p') {
    size_t j = i + 4;
    size_t ws = j;
    while (ws < s.size() && (s[ws] == ' ' || s[ws] == '\t')) ++ws;
    if (ws > j && ws < s.size() && std::isdigit(static_cast<unsigned char>(s[ws]))) {
      while (ws < s.size() && std::isdigit(static_cast<unsigned char>(s[ws]))) ++ws;
      if (ws < s.size() && (s[ws] == ':' || s[ws] == '.' || s[ws] == ')')) ++ws;
      return ws - pos;
    }
    return 0;
  }
  if (std::isdigit(static_cast<unsigned char>(s[i]))) {
    size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j < s.size() && (s[j] == '.' || s[j] == ')')) {
      size_t after = j + 1;
      if (after >= s.size() || s[after] == ' ' || s[after] == '\t' || s[after] == '\n') {
        return after - pos;
      }
    }
  }
  return 0;
}

std::vector<std::string> split_paragraphs(const std::string& body) {
  std::vector<std::string> parts;
  size_t start = 0;
  size_t i = 0;
  auto flush = [&](size_t end) {
    std::string part = trim(body.substr(start, end - start));
    if (!part.empty()) parts.push_back(part);
  };
  while (i < body.size()) {
    if (body[i] == '\n') {
      size_t j = i + 1;
      bool blank = false;
      while (j < body.size() && (body[j] == ' ' || body[j] == '\t' || body[j] == '\r')) ++j;
      if (j < body.size() && body[j] == '\n') blank = true;
      if (blank) {
        flush(i);
        while (j < body.size() && (body[j] == '\n' || body[j] == ' ' || body[j] == '\t' ||
                                   body[j] == '\r')) {
          ++j;
        }
        start = j;
        i = j;
        continue;
      }
    }
    ++i;
  }
  flush(body.size());
  return parts;
}

std::vector<std::string> split_steps(const std::string& body) {
  // Collect line starts that carry a step marker.
  std::vector<std::pair<size_t, size_t>> markers;  // (position, marker length)
  size_t line_start = 0;
  for (size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == '\n') {
      size_t p = line_start;
      while (p < i && (body[p] == ' ' || body[p] == '\t')) ++p;
      if (p < i) {
        size_t len = step_marker_length(body, p);
        if (len > 0) markers.emplace_back(p, len);
      }
      line_start = i + 1;
    }
  }

  std::vector<std::string> steps;
  if (!markers.empty()) {
    // Preamble before the first marker is dropped only if empty after trim;
    // otherwise it is kept as a leading step.
    std::string preamble = trim(body.substr(0, markers.front().first));
    if (!preamble.empty()) steps.push_back(preamble);
    for (size_t m = 0; m < markers.size(); ++m) {
      size_t content_begin = markers[m].first + markers[m].second;
      size_t content_end = (m + 1 < markers.size()) ? markers[m + 1].first : body.size();
      std::string step = trim(body.substr(content_begin, content_end - content_begin));
      if (!step.empty()) steps.push_back(step);
    }
    if (!steps.empty()) return steps;
  }

  steps = split_paragraphs(body);
  if (steps.size() >= 2) return steps;

  std::string whole = trim(body);
  if (!whole.empty()) return {whole};
  return {};
}

}  // namespace

ParsedResponse parse_response(const std::string& raw) {
  if (trim(raw).empty()) throw AgentError("parse_response: empty response text");

  const std::string lower = to_lower(raw);
  size_t fa_pos = find_last_ci(lower, "final answer");
  size_t ac_pos = find_last_ci(lower, "answer:");

  size_t marker_start = std::string::npos;
  size_t content_start = std::string::npos;
  if (fa_pos != std::string::npos && ac_pos != std::string::npos && ac_pos >= fa_pos &&
      ac_pos <= fa_pos + 6) {
    // "answer:" is the tail of this same "final answer:" occurrence.
    marker_start = fa_pos;
    content_start = ac_pos + 7;
  } else if (fa_pos != std::string::npos &&
             (ac_pos == std::string::npos || fa_pos > ac_pos)) {
    marker_start = fa_pos;
    content_start = fa_pos + std::string("final answer").size();
  } else if (ac_pos != std::string::npos) {
    marker_start = ac_pos;
    content_start = ac_pos + std::string("answer:").size();
  }

  ParsedResponse out;
  std::string body = raw;
  if (marker_start != std::string::npos) {
    out.final_answer = trim(raw.substr(skip_separators(raw, content_start)));
    body = raw.substr(0, marker_start);
  }

  out.steps = split_steps(body);
  if (out.steps.empty()) {
    // Marker at the very start ("Answer: 42"): the answer is the whole trace.
    if (!out.final_answer.empty()) {
      out.steps = {out.final_answer};
    } else {
      out.steps = {trim(raw)};
    }
  }
  if (out.final_answer.empty()) out.final_answer = out.steps.back();
  return out;
}

AgentResponse Agent::solve(const std::string& problem_text, const std::string& problem_id) {
  (void)problem_id;
  const std::string prompt = build_prompt(problem_text);
  auto start = std::chrono::steady_clock::now();
  std::string completion = complete(prompt);
  auto end = std::chrono::steady_clock::now();
  if (trim(completion).empty()) throw AgentError("empty completion");

  ParsedResponse parsed = parse_response(completion);
  AgentResponse response;
  response.raw_text = std::move(completion);
  response.final_answer = std::move(parsed.final_answer);
  response.steps = std::move(parsed.steps);
  response.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
  response.model_id = model_id();
  return response;
}

HttpAgent::HttpAgent(AgentConfig config) : config_(std::move(config)) { config_.validate(); }

HttpAgent::Completion HttpAgent::complete_with_usage(const std::string& prompt) {
  json body;
  body["model"] = config_.model_id;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = config_.temperature;
  body["top_p"] = config_.top_p;
  body["max_tokens"] = config_.max_tokens;
  const std::string payload = body.dump();

  std::string api_key;
  if (!config_.api_key_ref.empty()) {
    if (const char* v = std::getenv(config_.api_key_ref.c_str())) api_key = v;
  }

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      // Exponential backoff with jitter; capped so stalls stay bounded.
      long delay = static_cast<long>(config_.retry_base_ms) * (1L << (attempt - 1));
      delay = std::min(delay, 30000L);
      std::uniform_int_distribution<long> jitter(0, std::max(1L, delay / 2));
      std::this_thread::sleep_for(std::chrono::milliseconds(delay + jitter(jitter_rng)));
    }

    HttpResult res =
        http_post_json(config_.endpoint_url, payload, api_key, config_.request_timeout_s);
    if (!res.transport_ok) {
      last_error = "transport error: " + res.error;
      continue;
    }
    if (res.status == 429 || res.status >= 500) {
      last_error = "HTTP " + std::to_string(res.status);
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      throw AgentError("chat endpoint returned HTTP " + std::to_string(res.status) + " for model " +
                       config_.model_id);
    }

    json doc;
    try {
      doc = json::parse(res.body);
    } catch (const json::exception& e) {
      throw AgentError(std::string("malformed chat response: ") + e.what());
    }
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
      throw AgentError("chat response has no choices");
    }
    const json& message = doc["choices"][0].contains("message") ? doc["choices"][0]["message"]
                                                                : json::object();
    std::string content;
    if (message.contains("content") && message["content"].is_string()) {
      content = message["content"].get<std::string>();
    }
    if (trim(content).empty()) throw AgentError("empty completion");

    Completion completion;
    completion.text = std::move(content);
    if (doc.contains("usage") && doc["usage"].is_object()) {
      const json& usage = doc["usage"];
      int prompt_tokens = usage.value("prompt_tokens", 0);
      int completion_tokens = usage.value("completion_tokens", 0);
      completion.token_counts = std::make_pair(prompt_tokens, completion_tokens);
    }
    return completion;
  }
  throw AgentError("request to " + config_.endpoint_url + " failed after " +
                   std::to_string(config_.max_retries + 1) + " attempts (" + last_error + ")");
}

std::string HttpAgent::complete(const std::string& prompt) {
  return complete_with_usage(prompt).text;
}

AgentResponse HttpAgent::solve(const std::string& problem_text, const std::string& problem_id) {
  (void)problem_id;
  const std::string prompt = build_prompt(problem_text);
  auto start = std::chrono::steady_clock::now();
  Completion completion = complete_with_usage(prompt);
  auto end = std::chrono::steady_clock::now();

  ParsedResponse parsed = parse_response(completion.text);
  AgentResponse response;
  response.raw_text = std::move(completion.text);
  response.final_answer = std::move(parsed.final_answer);
  response.steps = std::move(parsed.steps);
  response.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
  response.token_counts = completion.token_counts;
  response.model_id = config_.model_id;
  return response;
}

MockAgent MockAgent::with_table(std::string model_id,
                                std::map<std::string, std::string> prompt_to_completion) {
  MockAgent agent;
  agent.model_id_ = std::move(model_id);
  agent.table_ = std::move(prompt_to_completion);
  return agent;
}

MockAgent MockAgent::reference_echo(std::string model_id, Corpus corpus) {
  MockAgent agent;
  agent.model_id_ = std::move(model_id);
  agent.echo_mode_ = true;
  agent.corpus_ = std::move(corpus);
  return agent;
}

std::string MockAgent::complete(const std::string& prompt) {
  if (echo_mode_) {
    throw AgentError("MockAgent(reference-echo): use solve() with a problem id");
  }
  auto it = table_.find(prompt);
  if (it == table_.end()) throw AgentError("MockAgent: no scripted completion for prompt");
  return it->second;
}

AgentResponse MockAgent::solve(const std::string& problem_text, const std::string& problem_id) {
  if (!echo_mode_) return Agent::solve(problem_text, problem_id);
  const Problem* p = corpus_.find(problem_id);
  if (p == nullptr) {
    throw AgentError("MockAgent(reference-echo): unknown problem id \"" + problem_id + "\"");
  }
  build_prompt(problem_text);  // same precondition as a real call
  std::string completion = reference_text(*p);
  ParsedResponse parsed = parse_response(completion);
  AgentResponse response;
  response.raw_text = std::move(completion);
  response.final_answer = std::move(parsed.final_answer);
  response.steps = std::move(parsed.steps);
  response.latency_ms = 0;
  response.model_id = model_id_;
  return response;
}

}  // namespace seminv
