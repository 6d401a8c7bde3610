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

#ifndef SEMINV_EMBED_HPP
#define SEMINV_EMBED_HPP

#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace seminv {

class EmbedError : public std::runtime_error {
 public:
  explicit EmbedError(const std::string& what) : std::runtime_error(what) {}
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_id;  // provider + model; vectors mix only within one id

  size_t dimension() const { return values.size(); }
};

// cos(a, b) = dot / (|a| |b|). Throws on provider/dimension mismatch and on
// zero-norm input (a zero norm means degenerate text upstream, not zero
// similarity).
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

enum class ProviderMode { remote, local_deterministic };

// Persistent content-addressed vector cache. Key: provider id, model
// identifier, SHA-256 of the text. Concurrent lookups are safe; duplicate
// inserts overwrite with identical values (providers are deterministic).
class EmbeddingCache {
 public:
  EmbeddingCache() = default;

  bool get(const std::string& key, std::vector<double>& out) const;
  void put(const std::string& key, const std::vector<double>& values);
  size_t size() const;

  void load(const std::string& path);  // missing file is an empty cache
  void save(const std::string& path) const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual const std::string& provider_id() const = 0;
  virtual const std::string& model_identifier() const = 0;
  virtual size_t dimension() const = 0;
  virtual ProviderMode mode() const = 0;

  // One vector per text, order-preserving. Repeated or cached texts skip the
  // underlying computation. Throws on empty input texts.
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);
  EmbeddingVector embed_one(const std::string& text);

  void set_cache(std::shared_ptr<EmbeddingCache> cache) { cache_ = std::move(cache); }

  // Number of texts actually sent to the underlying computation (cache
  // misses); used to observe cache behavior.
  size_t raw_calls() const;

 protected:
  virtual std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) = 0;

 private:
  std::string cache_key(const std::string& text) const;

  std::shared_ptr<EmbeddingCache> cache_;
  mutable std::mutex mu_;
  size_t raw_calls_ = 0;
};

// Offline deterministic provider: hashed bag of tokens. Lowercases, splits on
// non-alphanumerics, hashes each token (FNV-1a 64) into one of `dimension`
// buckets, counts, then L2-normalizes. Deterministic across processes and
// platforms; suitable only for relative-similarity sanity, not semantics.
class HashedBagProvider : public EmbeddingProvider {
 public:
  explicit HashedBagProvider(size_t dimension = 384);

  const std::string& provider_id() const override { return id_; }
  const std::string& model_identifier() const override { return model_; }
  size_t dimension() const override { return dimension_; }
  ProviderMode mode() const override { return ProviderMode::local_deterministic; }

 protected:
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;

 private:
  size_t dimension_;
  std::string id_;
  std::string model_;
};

// Remote provider speaking the OpenAI-compatible embeddings API. The model
// identifier defaults to the sentence-embedding model used for 384-d vectors.
struct RemoteEmbeddingConfig {
  std::string endpoint_url;  // e.g. "http://host:port/v1/embeddings"
  std::string model = "sentence-transformers/all-MiniLM-L6-v2";
  std::string api_key_ref;   // environment variable holding the API key
  size_t dimension = 384;    // declared; mismatching responses are an error
  int request_timeout_s = 60;
};

class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config);

  const std::string& provider_id() const override { return id_; }
  const std::string& model_identifier() const override { return config_.model; }
  size_t dimension() const override { return config_.dimension; }
  ProviderMode mode() const override { return ProviderMode::remote; }

 protected:
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;

 private:
  RemoteEmbeddingConfig config_;
  std::string id_;
};

}  // namespace seminv

#endif  // SEMINV_EMBED_HPP
