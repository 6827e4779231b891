// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "amafia/clock.hpp"

namespace amafia {

/// Sampling parameters forwarded to the model host.
struct DecodingParams {
  int max_new_tokens = 1;
  double repetition_penalty = 1.0;
  bool do_sample = false;
  double temperature = 1.0;
  int no_repeat_ngram_size = 0;  // 0 = unset

  /// Throws InvalidConfig when max_new_tokens < 1 or sampling at temperature <= 0.
  void validate() const;
  bool operator==(const DecodingParams&) const = default;
};

/// Greedy, 7 new tokens, repetition penalty 0.9.
DecodingParams scheduler_decoding();
/// Sampled at temperature 1.3, 25 new tokens, repetition penalty 1.25, no 8-gram repeats.
DecodingParams generator_decoding();
/// Greedy, short: one character name.
DecodingParams voter_decoding();

struct ChatTurn {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
  bool operator==(const ChatTurn&) const = default;
};

struct CompletionRequest {
  std::string model;
  std::vector<ChatTurn> messages;
  DecodingParams params;
};

struct CompletionResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  Duration latency{0};
  std::string request_hash;  // sha256 of the canonical request
  std::string payload_hash;  // sha256 of the provider's raw reply
  int attempts = 1;
};

/// Retryable failure (connection refused, 5xx, timeout).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One chat-completion backend. Implementations must be safe to call from
/// several threads at once.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual CompletionResponse complete(const CompletionRequest& request, Duration timeout) = 0;
};

struct RetryPolicy {
  int attempts = 3;
  Duration base_backoff{500};
  Duration deadline{30'000};
};

/// Front door for all LLM traffic: validation, request hashing, retries with
/// exponential backoff under a total deadline. Throws Error(LLMUnavailable)
/// once retries are exhausted.
class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<ChatProvider> provider, Clock& clock, RetryPolicy policy = {});

  CompletionResponse complete(const CompletionRequest& request);

  const RetryPolicy& policy() const { return policy_; }

 private:
  std::shared_ptr<ChatProvider> provider_;
  Clock& clock_;
  RetryPolicy policy_;
};

/// Canonical JSON encoding used for hashing and for the HTTP body.
std::string canonical_request_json(const CompletionRequest& request);

}  // namespace amafia
