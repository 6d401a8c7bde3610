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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "seminv/agent.hpp"
#include "seminv/corpus.hpp"
#include "seminv/text.hpp"

using namespace seminv;

namespace {

struct MockServer {
  httplib::Server server;
  std::thread worker;
  int port = 0;

  explicit MockServer(httplib::Server::Handler handler) {
    server.Post("/v1/chat/completions", std::move(handler));
    port = server.bind_to_any_port("127.0.0.1");
    worker = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~MockServer() {
    server.stop();
    worker.join();
  }

  AgentConfig config(const std::string& model_id = "test-model") const {
    AgentConfig cfg;
    cfg.model_id = model_id;
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.max_retries = 2;
    cfg.retry_base_ms = 1;  // keep test backoff instant
    cfg.request_timeout_s = 5;
    return cfg;
  }
};

std::string completion_body(const std::string& content) {
  nlohmann::json doc;
  doc["choices"] = {{{"message", {{"role", "assistant"}, {"content", content}}}}};
  doc["usage"] = {{"prompt_tokens", 21}, {"completion_tokens", 17}};
  return doc.dump();
}

Corpus mini_corpus() {
  Problem p;
  p.id = "p1";
  p.category = Category::Mathematics;
  p.difficulty = Difficulty::Easy;
  p.statement = "Add 2 and 2. Report the sum.";
  p.reference_answer = "The sum is 4.";
  p.reference_steps = {"Adding 2 and 2 gives 4.", "So the sum is 4."};
  Corpus c;
  c.schema_version = "1";
  c.problems = {p};
  return c;
}

}  // namespace

TEST_CASE("build_prompt pins the exact solving template") {
  CHECK(build_prompt("2+2?") ==
        "Solve the following problem step by step. Show your reasoning clearly before "
        "providing the final answer.\n\nProblem: 2+2?");
  CHECK_THROWS_AS(build_prompt(""), AgentError);
  CHECK_THROWS_AS(build_prompt("   \n"), AgentError);

  // Multi-line statements pass through verbatim.
  std::string prompt = build_prompt("line one\nline two");
  CHECK(prompt.substr(prompt.size() - 17) == "line one\nline two");
}

TEST_CASE("parse_response handles the step-marker fixture") {
  ParsedResponse r = parse_response("Step 1: a\nStep 2: b\nFinal answer: 42");
  CHECK(r.steps == std::vector<std::string>{"a", "b"});
  CHECK(r.final_answer == "42");
}

TEST_CASE("parse_response degenerate and paragraph fixtures") {
  ParsedResponse hello = parse_response("hello");
  CHECK(hello.steps == std::vector<std::string>{"hello"});
  CHECK(hello.final_answer == "hello");

  ParsedResponse paras = parse_response("para1\n\npara2");
  CHECK(paras.steps == std::vector<std::string>{"para1", "para2"});
  CHECK(paras.final_answer == "para2");
}

TEST_CASE("parse_response recognizes the documented marker forms") {
  ParsedResponse dotted = parse_response("1. first\n2. second\nAnswer: done");
  CHECK(dotted.steps == std::vector<std::string>{"first", "second"});
  CHECK(dotted.final_answer == "done");

  ParsedResponse parens = parse_response("1) uno\n2) dos");
  CHECK(parens.steps == std::vector<std::string>{"uno", "dos"});

  // A decimal number at a line start is not a step marker.
  ParsedResponse decimals = parse_response("9.8 is the acceleration\n\nnext part");
  CHECK(decimals.steps.size() == 2);

  // The last marker wins when several are present.
  ParsedResponse multi = parse_response("Answer: draft\nmore work\nFinal answer: final");
  CHECK(multi.final_answer == "final");
}

TEST_CASE("parse_response keeps multi-line steps verbatim") {
  ParsedResponse r = parse_response("Step 1: compute\nstill step one\nStep 2: conclude");
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[0] == "compute\nstill step one");
  CHECK(r.steps[1] == "conclude");
  CHECK(r.final_answer == "conclude");
}

TEST_CASE("parse_response answer is a trimmed substring of the raw text") {
  std::mt19937 rng(31);
  const std::vector<std::string> pieces = {"Step 1: ", "Answer:",    "final answer", "alpha",
                                           "\n\n",     "42 and 9.8", "done.",        "\n",
                                           "2. ",      "beta gamma"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    size_t n = 1 + rng() % 8;
    for (size_t i = 0; i < n; ++i) raw += pieces[rng() % pieces.size()];
    if (trim(raw).empty()) continue;
    ParsedResponse r = parse_response(raw);
    REQUIRE(!r.steps.empty());
    CHECK(!r.final_answer.empty());
    CHECK(raw.find(r.final_answer) != std::string::npos);
    for (const std::string& step : r.steps) {
      CHECK(raw.find(step) != std::string::npos);
    }
  }
}

TEST_CASE("parse_response rejects empty input") {
  CHECK_THROWS_AS(parse_response(""), AgentError);
  CHECK_THROWS_AS(parse_response("  \n "), AgentError);
}

TEST_CASE("solve sends one user message with the sampling fields") {
  nlohmann::json seen_body;
  std::string seen_auth;
  MockServer mock([&](const httplib::Request& req, httplib::Response& res) {
    seen_body = nlohmann::json::parse(req.body);
    if (req.has_header("Authorization")) seen_auth = req.get_header_value("Authorization");
    res.set_content(completion_body("Step 1: add\nFinal answer: 4"), "application/json");
  });

  setenv("SEMINV_TEST_KEY", "sk-test-123", 1);
  AgentConfig cfg = mock.config();
  cfg.api_key_ref = "SEMINV_TEST_KEY";
  HttpAgent agent(cfg);
  AgentResponse r = agent.solve("2+2?");

  CHECK(r.raw_text == "Step 1: add\nFinal answer: 4");
  CHECK(r.final_answer == "4");
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0] == "add");
  CHECK(r.model_id == "test-model");
  REQUIRE(r.token_counts.has_value());
  CHECK(r.token_counts->first == 21);
  CHECK(r.token_counts->second == 17);

  CHECK(seen_body["model"] == "test-model");
  CHECK(seen_body["temperature"] == doctest::Approx(0.7));
  CHECK(seen_body["top_p"] == doctest::Approx(0.95));
  CHECK(seen_body["max_tokens"] == 1024);
  REQUIRE(seen_body["messages"].size() == 1);
  CHECK(seen_body["messages"][0]["role"] == "user");
  CHECK(seen_body["messages"][0]["content"] == build_prompt("2+2?"));
  CHECK(seen_auth == "Bearer sk-test-123");
  unsetenv("SEMINV_TEST_KEY");
}

TEST_CASE("5xx responses are retried up to the budget then fail") {
  std::atomic<int> hits{0};
  MockServer mock([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  HttpAgent agent(mock.config());  // max_retries = 2
  CHECK_THROWS_AS(agent.solve("2+2?"), AgentError);
  CHECK(hits.load() == 3);  // initial attempt + 2 retries
}

TEST_CASE("429 is retried and a later success is accepted") {
  std::atomic<int> hits{0};
  MockServer mock([&](const httplib::Request&, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 429;
      return;
    }
    res.set_content(completion_body("all good"), "application/json");
  });
  HttpAgent agent(mock.config());
  AgentResponse r = agent.solve("2+2?");
  CHECK(r.raw_text == "all good");
  CHECK(hits.load() == 3);
}

TEST_CASE("4xx other than 429 fails immediately") {
  std::atomic<int> hits{0};
  MockServer mock([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 404;
  });
  HttpAgent agent(mock.config());
  CHECK_THROWS_AS(agent.solve("2+2?"), AgentError);
  CHECK(hits.load() == 1);
}

TEST_CASE("an empty completion is an error, not a retry") {
  std::atomic<int> hits{0};
  MockServer mock([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content(completion_body("   "), "application/json");
  });
  HttpAgent agent(mock.config());
  CHECK_THROWS_WITH_AS(agent.solve("2+2?"), "empty completion", AgentError);
  CHECK(hits.load() == 1);  // successful completions are never retried
}

TEST_CASE("unreachable endpoints fail after the retry budget") {
  AgentConfig cfg;
  cfg.model_id = "m";
  cfg.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  cfg.max_retries = 1;
  cfg.retry_base_ms = 1;
  cfg.request_timeout_s = 2;
  HttpAgent agent(cfg);
  CHECK_THROWS_AS(agent.solve("2+2?"), AgentError);
}

TEST_CASE("config validation rejects out-of-range sampling fields") {
  AgentConfig cfg;
  cfg.model_id = "m";
  cfg.endpoint_url = "http://x/v1/chat/completions";
  cfg.temperature = -0.1;
  CHECK_THROWS_AS(cfg.validate(), AgentError);
  cfg.temperature = 0.7;
  cfg.top_p = 0.0;
  CHECK_THROWS_AS(cfg.validate(), AgentError);
  cfg.top_p = 1.5;
  CHECK_THROWS_AS(cfg.validate(), AgentError);
  cfg.top_p = 0.95;
  cfg.max_tokens = 0;
  CHECK_THROWS_AS(cfg.validate(), AgentError);
  cfg.max_tokens = 1024;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("mock agent table mode replays scripted completions deterministically") {
  std::map<std::string, std::string> table = {
      {build_prompt("2+2?"), "Step 1: compute\nFinal answer: 4"}};
  MockAgent agent = MockAgent::with_table("mock-a", table);
  AgentResponse first = agent.solve("2+2?");
  AgentResponse second = agent.solve("2+2?");
  CHECK(first.raw_text == second.raw_text);
  CHECK(first.final_answer == "4");
  CHECK(first.steps == second.steps);
  CHECK_THROWS_AS(agent.solve("unknown"), AgentError);
}

TEST_CASE("mock agent reference-echo replays the reference solution") {
  Corpus corpus = mini_corpus();
  MockAgent agent = MockAgent::reference_echo("mock-echo", corpus);
  AgentResponse r = agent.solve("Some transformed variant of the problem 2 and 2.", "p1");
  CHECK(r.raw_text == reference_text(corpus.problems[0]));
  CHECK(r.model_id == "mock-echo");
  CHECK_THROWS_AS(agent.solve("text", "missing-id"), AgentError);
}
