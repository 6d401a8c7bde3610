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

#include "seminv/embed.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "seminv/http_util.hpp"
#include "seminv/sha256.hpp"
#include "seminv/text.hpp"

namespace seminv {

using nlohmann::json;

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.provider_id != b.provider_id) {
    throw EmbedError("cosine: provider mismatch (\"" + a.provider_id + "\" vs \"" +
                     b.provider_id + "\")");
  }
  if (a.dimension() != b.dimension() || a.dimension() == 0) {
    throw EmbedError("cosine: dimension mismatch (" + std::to_string(a.dimension()) + " vs " +
                     std::to_string(b.dimension()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw EmbedError("cosine: zero-norm vector (degenerate embedding)");
  }
  // Identical vectors have cosine exactly 1; skip the norm rounding.
  if (a.values == b.values) return 1.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool EmbeddingCache::get(const std::string& key, std::vector<double>& out) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  out = it->second;
  return true;
}

void EmbeddingCache::put(const std::string& key, const std::vector<double>& values) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = values;
}

size_t EmbeddingCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

void EmbeddingCache::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  json doc;
  try {
    in >> doc;
  } catch (const json::exception&) {
    return;  // unreadable cache files are treated as empty, values get recomputed
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_object()) return;
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [key, value] : doc["entries"].items()) {
    if (!value.is_array()) continue;
    entries_[key] = value.get<std::vector<double>>();
  }
}

void EmbeddingCache::save(const std::string& path) const {
  json entries = json::object();
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [key, values] : entries_) entries[key] = values;
  }
  json doc;
  doc["entries"] = entries;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EmbedError("cannot open embedding cache \"" + path + "\" for writing");
  out << doc.dump() << "\n";
}

std::string EmbeddingProvider::cache_key(const std::string& text) const {
  return provider_id() + "\x1f" + model_identifier() + "\x1f" + sha256_hex(text);
}

size_t EmbeddingProvider::raw_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return raw_calls_;
}

EmbeddingVector EmbeddingProvider::embed_one(const std::string& text) {
  return embed({text}).front();
}

std::vector<EmbeddingVector> EmbeddingProvider::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw EmbedError("embed: no texts given");
  for (const std::string& t : texts) {
    if (t.empty()) throw EmbedError("embed: empty text");
  }
  const std::string vec_id = provider_id() + ":" + model_identifier();

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<size_t> missing;
  std::unordered_map<std::string, size_t> first_miss;  // dedupe repeats in one batch
  for (size_t i = 0; i < texts.size(); ++i) {
    std::vector<double> cached;
    if (cache_ && cache_->get(cache_key(texts[i]), cached)) {
      out[i] = EmbeddingVector{std::move(cached), vec_id};
      continue;
    }
    auto [it, inserted] = first_miss.try_emplace(texts[i], i);
    if (inserted) missing.push_back(i);
    (void)it;
  }

  if (!missing.empty()) {
    std::vector<std::string> batch;
    batch.reserve(missing.size());
    for (size_t i : missing) batch.push_back(texts[i]);
    std::vector<std::vector<double>> vectors = embed_raw(batch);
    if (vectors.size() != batch.size()) {
      throw EmbedError("provider returned " + std::to_string(vectors.size()) + " vectors for " +
                       std::to_string(batch.size()) + " texts");
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      raw_calls_ += batch.size();
    }
    for (size_t j = 0; j < missing.size(); ++j) {
      if (vectors[j].size() != dimension()) {
        throw EmbedError("provider returned dimension " + std::to_string(vectors[j].size()) +
                         ", declared " + std::to_string(dimension()));
      }
      for (double v : vectors[j]) {
        if (!std::isfinite(v)) throw EmbedError("provider returned non-finite component");
      }
      if (cache_) cache_->put(cache_key(batch[j]), vectors[j]);
      out[missing[j]] = EmbeddingVector{std::move(vectors[j]), vec_id};
    }
  }

  // Fill duplicate texts from their first computed occurrence.
  for (size_t i = 0; i < texts.size(); ++i) {
    if (out[i].provider_id == vec_id) continue;
    auto it = first_miss.find(texts[i]);
    if (it != first_miss.end()) out[i] = out[it->second];
  }
  return out;
}

namespace {

// FNV-1a 64-bit; fixed offset basis acts as the stable seed.
uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

HashedBagProvider::HashedBagProvider(size_t dimension)
    : dimension_(dimension),
      id_("local-deterministic"),
      model_("hashed-bag-fnv1a64-d" + std::to_string(dimension)) {
  if (dimension == 0) throw EmbedError("HashedBagProvider: dimension must be positive");
}

std::vector<std::vector<double>> HashedBagProvider::embed_raw(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    std::vector<double> v(dimension_, 0.0);
    for (const std::string& token : tokenize(text)) {
      v[fnv1a64(token) % dimension_] += 1.0;
    }
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (double& x : v) x *= inv;
    }
    // Token-free text stays all-zero; cosine rejects it downstream.
    out.push_back(std::move(v));
  }
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config)
    : config_(std::move(config)), id_("remote") {
  if (config_.endpoint_url.empty()) {
    throw EmbedError("RemoteEmbeddingProvider: endpoint_url required");
  }
  if (config_.dimension == 0) throw EmbedError("RemoteEmbeddingProvider: dimension must be positive");
}

std::vector<std::vector<double>> RemoteEmbeddingProvider::embed_raw(
    const std::vector<std::string>& texts) {
  json body;
  body["model"] = config_.model;
  body["input"] = texts;

  std::string api_key;
  if (!config_.api_key_ref.empty()) {
    if (const char* v = std::getenv(config_.api_key_ref.c_str())) api_key = v;
  }

  HttpResult res = http_post_json(config_.endpoint_url, body.dump(), api_key,
                                  config_.request_timeout_s);
  if (!res.transport_ok) {
    throw EmbedError("embedding endpoint unreachable: " + res.error);
  }
  if (res.status < 200 || res.status >= 300) {
    throw EmbedError("embedding endpoint returned HTTP " + std::to_string(res.status));
  }

  json doc;
  try {
    doc = json::parse(res.body);
  } catch (const json::exception& e) {
    throw EmbedError(std::string("malformed embeddings response: ") + e.what());
  }
  if (!doc.contains("data") || !doc["data"].is_array()) {
    throw EmbedError("embeddings response missing \"data\"");
  }
  std::vector<std::vector<double>> out(texts.size());
  size_t filled = 0;
  for (const json& item : doc["data"]) {
    if (!item.contains("embedding") || !item["embedding"].is_array()) {
      throw EmbedError("embeddings response entry missing \"embedding\"");
    }
    size_t index = item.contains("index") ? item["index"].get<size_t>() : filled;
    if (index >= out.size()) throw EmbedError("embeddings response index out of range");
    out[index] = item["embedding"].get<std::vector<double>>();
    ++filled;
  }
  if (filled != texts.size()) {
    throw EmbedError("embeddings response has " + std::to_string(filled) + " vectors for " +
                     std::to_string(texts.size()) + " inputs");
  }
  return out;
}

}  // namespace seminv
