// SPDX-License-Identifier: Apache-2.0
#include "amafia/llm/gateway.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "amafia/digest.hpp"
#include "amafia/error.hpp"

namespace amafia {

void DecodingParams::validate() const {
  if (max_new_tokens < 1) throw Error(Errc::InvalidConfig, "max_new_tokens must be >= 1");
  if (do_sample && !(temperature > 0.0))
    throw Error(Errc::InvalidConfig, "temperature must be > 0 when sampling");
  if (no_repeat_ngram_size < 0) throw Error(Errc::InvalidConfig, "no_repeat_ngram_size must be >= 0");
}

DecodingParams scheduler_decoding() { return {7, 0.9, false, 1.0, 0}; }
DecodingParams generator_decoding() { return {25, 1.25, true, 1.3, 8}; }
DecodingParams voter_decoding() { return {8, 1.0, false, 1.0, 0}; }

std::string canonical_request_json(const CompletionRequest& r) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : r.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  nlohmann::json j = {
      {"model", r.model},
      {"messages", std::move(msgs)},
      {"max_tokens", r.params.max_new_tokens},
      {"repetition_penalty", r.params.repetition_penalty},
      {"do_sample", r.params.do_sample},
      {"temperature", r.params.do_sample ? r.params.temperature : 0.0},
  };
  if (r.params.no_repeat_ngram_size > 0) j["no_repeat_ngram_size"] = r.params.no_repeat_ngram_size;
  return j.dump();
}

LlmGateway::LlmGateway(std::shared_ptr<ChatProvider> provider, Clock& clock, RetryPolicy policy)
    : provider_(std::move(provider)), clock_(clock), policy_(policy) {
  if (!provider_) throw Error(Errc::InvalidConfig, "LLM gateway needs a provider");
  if (policy_.attempts < 1) policy_.attempts = 1;
}

CompletionResponse LlmGateway::complete(const CompletionRequest& request) {
  request.params.validate();
  const std::string request_hash = sha256_hex(canonical_request_json(request));
  const TimePoint start = clock_.now();
  const TimePoint deadline = start + policy_.deadline;
  Duration backoff = policy_.base_backoff;
  std::string last_error = "no attempt made";

  for (int attempt = 1; attempt <= policy_.attempts; ++attempt) {
    const Duration remaining = deadline - clock_.now();
    if (remaining <= Duration::zero()) {
      last_error = "deadline exceeded";
      break;
    }
    const TimePoint attempt_start = clock_.now();
    try {
      CompletionResponse resp = provider_->complete(request, remaining);
      if (resp.latency == Duration::zero()) resp.latency = clock_.now() - attempt_start;
      resp.request_hash = request_hash;
      resp.attempts = attempt;
      return resp;
    } catch (const TransportError& e) {
      last_error = e.what();
      spdlog::debug("llm attempt {}/{} failed: {}", attempt, policy_.attempts, e.what());
    } catch (const Error& e) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Errc::LLMUnavailable, std::string("LLM provider error: ") + e.what());
    }
    if (attempt < policy_.attempts) {
      if (clock_.now() + backoff >= deadline) {
        last_error += " (deadline reached before retry)";
        break;
      }
      clock_.sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(Errc::LLMUnavailable, "LLM unavailable: " + last_error);
}

}  // namespace amafia
