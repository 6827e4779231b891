// SPDX-License-Identifier: Apache-2.0
#include "amafia/llm/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "amafia/digest.hpp"
#include "amafia/error.hpp"
#include "amafia/rng.hpp"
#include "http_client.hpp"

namespace amafia {

// ---- HashEmbeddingProvider ----

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw Error(Errc::InvalidConfig, "embedding dimension must be > 0");
}

std::string HashEmbeddingProvider::model_id() const {
  return "hash-stub-d" + std::to_string(dimension_) + "-s" + std::to_string(seed_);
}

std::vector<std::vector<double>> HashEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    SeededRng rng(derive_seed(seed_, fnv1a64(t)));
    std::vector<double> v(dimension_);
    double norm = 0.0;
    for (auto& x : v) {
      // Box-Muller keeps the direction uniform on the sphere.
      double u1 = rng.uniform();
      double u2 = rng.uniform();
      x = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

// ---- HttpEmbeddingProvider ----

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEndpoint endpoint, std::string model, Duration timeout)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_(timeout) {}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  nlohmann::json body = {{"model", model_}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  auto reply = detail::post_json(endpoint_, detail::api_path(endpoint_.base_url, "/embeddings"), body.dump(),
                                 timeout_);
  if (reply.status != 200)
    throw Error(Errc::EmbeddingUnavailable, "embedding endpoint returned HTTP " + std::to_string(reply.status));
  auto j = nlohmann::json::parse(reply.body);
  std::vector<std::vector<double>> out(texts.size());
  for (const auto& item : j.at("data")) {
    std::size_t idx = item.value("index", std::size_t{0});
    if (idx >= out.size()) throw Error(Errc::EmbeddingUnavailable, "embedding index out of range");
    out[idx] = item.at("embedding").get<std::vector<double>>();
  }
  return out;
}

// ---- EmbeddingCache ----

namespace {

constexpr char kMagic[4] = {'A', 'M', 'E', 'V'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{static_cast<unsigned char>(in[pos + i])} << (8 * i);
  return v;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(Errc::IOFailure, "cannot create embedding cache at " + root_.string());
}

std::string EmbeddingCache::key(const std::string& model_id, const std::string& text) {
  std::string material = model_id;
  material.push_back('\0');
  material += text;
  return sha256_hex(material);
}

std::filesystem::path EmbeddingCache::path_for(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".vec");
}

std::optional<std::vector<double>> EmbeddingCache::load(const std::string& model_id,
                                                        const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 16 || std::memcmp(data.data(), kMagic, 4) != 0) return std::nullopt;
  if (get_le(data, 4, 4) != kCacheVersion) return std::nullopt;
  const std::size_t dim = get_le(data, 8, 4);
  const std::size_t mlen = get_le(data, 12, 4);
  if (data.size() != 16 + mlen + dim * 8) return std::nullopt;
  if (data.compare(16, mlen, model_id) != 0) return std::nullopt;
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = std::bit_cast<double>(get_le(data, 16 + mlen + i * 8, 8));
  return v;
}

void EmbeddingCache::store(const std::string& model_id, const std::string& key, std::span<const double> values) {
  std::string data(kMagic, 4);
  put_u32(data, kCacheVersion);
  put_u32(data, static_cast<std::uint32_t>(values.size()));
  put_u32(data, static_cast<std::uint32_t>(model_id.size()));
  data += model_id;
  for (double d : values) put_f64(data, d);

  std::lock_guard lock(write_mu_);
  auto final_path = path_for(key);
  std::filesystem::create_directories(final_path.parent_path());
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(Errc::IOFailure, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

// ---- Embedder ----

Embedder::Embedder(std::shared_ptr<EmbeddingProvider> provider, std::optional<std::filesystem::path> cache_dir,
                   std::size_t batch_size)
    : provider_(std::move(provider)), batch_size_(batch_size == 0 ? 1 : batch_size) {
  if (!provider_) throw Error(Errc::InvalidConfig, "embedder needs a provider");
  if (cache_dir) cache_.emplace(*cache_dir);
}

std::vector<EmbeddingVector> Embedder::embed(std::span<const std::string> texts) {
  const std::string model = provider_->model_id();
  std::vector<std::string> keys;
  keys.reserve(texts.size());
  std::vector<std::string> missing_texts;
  std::vector<std::string> missing_keys;
  std::set<std::string> queued;
  for (const auto& t : texts) {
    std::string k = EmbeddingCache::key(model, t);
    if (!memo_.contains(k)) {
      std::optional<std::vector<double>> hit;
      if (cache_) hit = cache_->load(model, k);
      if (hit) {
        memo_.emplace(k, std::move(*hit));
      } else if (queued.insert(k).second) {
        missing_keys.push_back(k);
        missing_texts.push_back(t);
      }
    }
    keys.push_back(std::move(k));
  }

  for (std::size_t start = 0; start < missing_texts.size(); start += batch_size_) {
    const std::size_t n = std::min(batch_size_, missing_texts.size() - start);
    std::vector<std::vector<double>> got;
    try {
      ++provider_calls_;
      got = provider_->embed_batch(std::span(missing_texts).subspan(start, n));
    } catch (const Error& e) {
      if (e.code() == Errc::EmbeddingUnavailable) throw;
      throw Error(Errc::EmbeddingUnavailable, e.what());
    } catch (const std::exception& e) {
      throw Error(Errc::EmbeddingUnavailable, e.what());
    }
    if (got.size() != n) throw Error(Errc::EmbeddingUnavailable, "provider returned a short batch");
    for (std::size_t i = 0; i < n; ++i) {
      if (got[i].empty() || (dimension_ && got[i].size() != *dimension_))
        throw Error(Errc::EmbeddingUnavailable, "inconsistent embedding dimension");
      dimension_ = got[i].size();
      if (cache_) cache_->store(model, missing_keys[start + i], got[i]);
      memo_.emplace(missing_keys[start + i], std::move(got[i]));
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& v = memo_.at(keys[i]);
    if (dimension_ && v.size() != *dimension_)
      throw Error(Errc::EmbeddingUnavailable, "cached vector has a different dimension");
    dimension_ = v.size();
    out.push_back(EmbeddingVector{v, model, sha256_hex(texts[i])});
  }
  return out;
}

}  // namespace amafia
