// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amafia/llm/providers.hpp"

namespace amafia {

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;
  std::string text_hash;  // sha256 of the embedded text
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string model_id() const = 0;
  /// One vector per input, same order. Throws on failure.
  virtual std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) = 0;
};

/// Offline stand-in: a unit vector derived from a seeded hash of the text.
/// Identical text -> identical vector on every machine.
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dimension = 64, std::uint64_t seed = 0);

  std::string model_id() const override;
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

/// OpenAI-style `POST /v1/embeddings`.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(HttpEndpoint endpoint, std::string model, Duration timeout = Duration{60'000});

  std::string model_id() const override { return model_; }
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) override;

 private:
  HttpEndpoint endpoint_;
  std::string model_;
  Duration timeout_;
};

/// On-disk vector cache: one file per sha256(model_id, text) under `root`.
/// File layout (little-endian): "AMEV", u32 version, u32 dimension,
/// u32 model-id length, model-id bytes, dimension x f64.
/// Writes go to a temp file and are renamed into place, so concurrent readers
/// only ever see complete entries.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path root);

  static std::string key(const std::string& model_id, const std::string& text);

  std::optional<std::vector<double>> load(const std::string& model_id, const std::string& key) const;
  void store(const std::string& model_id, const std::string& key, std::span<const double> values);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path root_;
  std::mutex write_mu_;
};

/// Order-preserving, cached, batched embedding front end.
class Embedder {
 public:
  Embedder(std::shared_ptr<EmbeddingProvider> provider, std::optional<std::filesystem::path> cache_dir,
           std::size_t batch_size = 64);

  /// Throws Error(EmbeddingUnavailable) when the provider fails or returns a
  /// vector of the wrong dimension.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts);

  /// Number of provider round trips so far (cache hits cost none).
  std::size_t provider_calls() const { return provider_calls_; }
  std::string model_id() const { return provider_->model_id(); }

 private:
  std::shared_ptr<EmbeddingProvider> provider_;
  std::optional<EmbeddingCache> cache_;
  std::size_t batch_size_;
  std::size_t provider_calls_ = 0;
  std::map<std::string, std::vector<double>> memo_;
  std::optional<std::size_t> dimension_;
};

}  // namespace amafia
