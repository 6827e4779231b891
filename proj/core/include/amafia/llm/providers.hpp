// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "amafia/llm/gateway.hpp"

namespace amafia {

/// Test double. Replies come from a scripted queue first, then from the
/// optional responder; every request is captured for later assertions.
/// With a clock attached, each call takes `latency` of that clock's time.
class ScriptedChatProvider final : public ChatProvider {
 public:
  /// A scripted step either yields text or simulates a transport failure.
  struct Step {
    std::string text;
    bool transport_failure = false;
  };
  using Responder = std::function<std::string(const CompletionRequest&)>;

  ScriptedChatProvider() = default;
  explicit ScriptedChatProvider(std::vector<std::string> replies);

  void push(std::string reply);
  void push_failure();
  void set_responder(Responder r);
  void set_latency(Clock* clock, Duration latency);

  CompletionResponse complete(const CompletionRequest& request, Duration timeout) override;

  std::vector<CompletionRequest> captured() const;
  std::size_t calls() const { return calls_.load(); }

 private:
  mutable std::mutex mu_;
  std::deque<Step> script_;
  Responder responder_;
  std::vector<CompletionRequest> captured_;
  Clock* clock_ = nullptr;
  Duration latency_{0};
  std::atomic<std::size_t> calls_{0};
};

struct HttpEndpoint {
  std::string base_url;  // e.g. http://localhost:8000 (path /v1/... is appended)
  std::string api_key;   // sent as a bearer token when non-empty
};

/// Reads AMAFIA_LLM_URL / AMAFIA_LLM_API_KEY. nullopt when the URL is unset.
std::optional<HttpEndpoint> chat_endpoint_from_env();
/// Reads AMAFIA_EMBED_URL / AMAFIA_EMBED_API_KEY (falling back to the chat key).
std::optional<HttpEndpoint> embedding_endpoint_from_env();

/// OpenAI-style `POST /v1/chat/completions`. Decoding knobs without a
/// standard field (repetition_penalty, do_sample, no_repeat_ngram_size) are
/// sent as extension fields; hosts that ignore them get a one-time warning.
class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpEndpoint endpoint);

  CompletionResponse complete(const CompletionRequest& request, Duration timeout) override;

 private:
  HttpEndpoint endpoint_;
  std::once_flag ngram_warning_;
};

}  // namespace amafia
