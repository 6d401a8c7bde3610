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
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "seminv/embed.hpp"
#include "seminv/text.hpp"

using namespace seminv;

namespace {

// Independent recount of the hashed bag: own FNV-1a, own bucketing, own
// normalization, structured differently from the provider.
std::vector<double> hashed_bag_oracle(const std::string& text, size_t dim) {
  auto fnv = [](const std::string& s) {
    unsigned long long h = 14695981039346656037ull;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    return h;
  };
  std::map<size_t, double> buckets;
  for (const std::string& token : tokenize(text)) buckets[fnv(token) % dim] += 1.0;
  double norm = 0.0;
  for (const auto& [b, v] : buckets) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<double> out(dim, 0.0);
  for (const auto& [b, v] : buckets) out[b] = v / norm;
  return out;
}

EmbeddingVector vec(std::vector<double> values, std::string id = "test") {
  return EmbeddingVector{std::move(values), std::move(id)};
}

}  // namespace

TEST_CASE("cosine identities and reference values") {
  CHECK(cosine(vec({1, 2, 3}), vec({1, 2, 3})) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cosine(vec({1, 0}), vec({0, 1})) == 0.0);
  CHECK(cosine(vec({1, 1}), vec({1, 0})) == doctest::Approx(0.70710678).epsilon(1e-6));
  CHECK(cosine(vec({1, 0}), vec({-1, 0})) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("cosine is symmetric and scale-invariant for positive scaling") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(8), b(8);
    for (int i = 0; i < 8; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
    }
    double ab = cosine(vec(a), vec(b));
    CHECK(ab == doctest::Approx(cosine(vec(b), vec(a))).epsilon(1e-14));
    CHECK(std::abs(ab) <= 1.0 + 1e-9);
    std::vector<double> scaled = a;
    for (double& x : scaled) x *= 3.5;
    CHECK(cosine(vec(a), vec(scaled)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cosine rejects mismatched and degenerate vectors") {
  CHECK_THROWS_AS(cosine(vec({1, 0}), vec({1, 0, 0})), EmbedError);
  CHECK_THROWS_AS(cosine(vec({1, 0}, "p1"), vec({1, 0}, "p2")), EmbedError);
  CHECK_THROWS_AS(cosine(vec({0, 0}), vec({1, 0})), EmbedError);  // zero norm is an error
}

TEST_CASE("local provider matches the independent recount oracle") {
  HashedBagProvider provider(384);
  const std::string text = "The cat sat on the mat 42 times.";
  EmbeddingVector v = provider.embed_one(text);
  REQUIRE(v.dimension() == 384);
  std::vector<double> expected = hashed_bag_oracle(text, 384);
  for (size_t i = 0; i < 384; ++i) {
    CHECK(v.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("golden vector for a fixed text is stable across processes") {
  // Recorded once: tokens {the x2, cat, sat, on, mat, 42, times}, norm sqrt(10).
  HashedBagProvider provider(384);
  EmbeddingVector v = provider.embed_one("The cat sat on the mat 42 times.");
  const double unit = 1.0 / std::sqrt(10.0);
  std::map<size_t, double> golden = {{112, unit}, {163, unit}, {247, unit}, {252, 2 * unit},
                                     {295, unit}, {309, unit}, {349, unit}};
  size_t nonzero = 0;
  for (size_t i = 0; i < v.values.size(); ++i) {
    if (v.values[i] != 0.0) {
      ++nonzero;
      auto it = golden.find(i);
      REQUIRE(it != golden.end());
      CHECK(v.values[i] == doctest::Approx(it->second).epsilon(1e-12));
    }
  }
  CHECK(nonzero == golden.size());
}

TEST_CASE("local provider is a pure function of the text") {
  HashedBagProvider p1(384), p2(384);
  auto a = p1.embed_one("Force equals mass times acceleration.");
  auto b = p2.embed_one("Force equals mass times acceleration.");
  CHECK(a.values == b.values);
  CHECK(a.provider_id == b.provider_id);
}

TEST_CASE("repeated texts are served from the cache") {
  HashedBagProvider provider(64);
  provider.set_cache(std::make_shared<EmbeddingCache>());
  auto vs = provider.embed({"a", "a"});
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].values == vs[1].values);
  CHECK(provider.raw_calls() == 1);  // the duplicate never reached the hash

  provider.embed({"a"});
  CHECK(provider.raw_calls() == 1);  // cache hit across calls
  provider.embed({"b"});
  CHECK(provider.raw_calls() == 2);
}

TEST_CASE("embed rejects empty input") {
  HashedBagProvider provider(64);
  CHECK_THROWS_AS(provider.embed({""}), EmbedError);
  CHECK_THROWS_AS(provider.embed({}), EmbedError);
  CHECK_THROWS_AS(provider.embed({"ok", ""}), EmbedError);
}

TEST_CASE("token-free text yields a zero vector that cosine rejects") {
  HashedBagProvider provider(64);
  auto v = provider.embed_one("!!! ---");
  CHECK_THROWS_AS(cosine(v, provider.embed_one("words here")), EmbedError);
}

TEST_CASE("cache persists to disk and reloads") {
  const std::string path = "embed_cache_test_tmp.json";
  {
    HashedBagProvider provider(64);
    auto cache = std::make_shared<EmbeddingCache>();
    provider.set_cache(cache);
    provider.embed({"alpha", "beta"});
    cache->save(path);
  }
  {
    HashedBagProvider provider(64);
    auto cache = std::make_shared<EmbeddingCache>();
    cache->load(path);
    CHECK(cache->size() == 2);
    provider.set_cache(cache);
    provider.embed({"alpha", "beta"});
    CHECK(provider.raw_calls() == 0);  // everything came from the reloaded cache
  }
  std::remove(path.c_str());
}

TEST_CASE("cache tolerates a missing or corrupt file") {
  EmbeddingCache cache;
  cache.load("/nonexistent/embed_cache.json");
  CHECK(cache.size() == 0);
  const std::string path = "embed_cache_corrupt_tmp.json";
  {
    std::ofstream out(path);
    out << "{not json";
  }
  cache.load(path);
  CHECK(cache.size() == 0);
  std::remove(path.c_str());
}

TEST_CASE("concurrent embeds with a shared cache stay consistent") {
  HashedBagProvider provider(128);
  provider.set_cache(std::make_shared<EmbeddingCache>());
  std::vector<std::string> texts;
  for (int i = 0; i < 16; ++i) texts.push_back("text number " + std::to_string(i % 4));
  auto reference = provider.embed(texts);
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&] {
      for (int iter = 0; iter < 20; ++iter) {
        auto vs = provider.embed(texts);
        for (size_t i = 0; i < vs.size(); ++i) {
          if (vs[i].values != reference[i].values) failed = true;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK_FALSE(failed.load());
}

TEST_CASE("remote provider speaks the embeddings wire format") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.contains("model"));
    REQUIRE(body.contains("input"));
    nlohmann::json data = nlohmann::json::array();
    int index = 0;
    for (const auto& text : body["input"]) {
      // Deterministic fake 4-d embedding derived from the text length.
      double len = static_cast<double>(text.get<std::string>().size());
      data.push_back({{"index", index++}, {"embedding", {len, 1.0, 0.0, 0.0}}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteEmbeddingConfig cfg;
  cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/embeddings";
  cfg.dimension = 4;
  RemoteEmbeddingProvider provider(cfg);
  provider.set_cache(std::make_shared<EmbeddingCache>());

  auto vs = provider.embed({"abc", "longer text"});
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].values[0] == 3.0);
  CHECK(vs[1].values[0] == 11.0);

  provider.embed({"abc"});
  CHECK(hits.load() == 1);  // second call was a cache hit

  // Declared dimension mismatch is an error.
  RemoteEmbeddingConfig bad = cfg;
  bad.dimension = 384;
  RemoteEmbeddingProvider bad_provider(bad);
  CHECK_THROWS_AS(bad_provider.embed({"abc"}), EmbedError);

  server.stop();
  server_thread.join();
}

TEST_CASE("remote provider reports unreachable endpoints") {
  RemoteEmbeddingConfig cfg;
  cfg.endpoint_url = "http://127.0.0.1:1/v1/embeddings";  // nothing listens here
  cfg.dimension = 4;
  cfg.request_timeout_s = 2;
  RemoteEmbeddingProvider provider(cfg);
  CHECK_THROWS_AS(provider.embed({"abc"}), EmbedError);
}
