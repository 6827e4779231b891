// SPDX-License-Identifier: Apache-2.0
#include "amafia/llm/providers.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "amafia/digest.hpp"
#include "amafia/error.hpp"
#include "http_client.hpp"

namespace amafia {

// ---- ScriptedChatProvider ----

ScriptedChatProvider::ScriptedChatProvider(std::vector<std::string> replies) {
  for (auto& r : replies) script_.push_back(Step{std::move(r), false});
}

void ScriptedChatProvider::push(std::string reply) {
  std::lock_guard lock(mu_);
  script_.push_back(Step{std::move(reply), false});
}

void ScriptedChatProvider::push_failure() {
  std::lock_guard lock(mu_);
  script_.push_back(Step{{}, true});
}

void ScriptedChatProvider::set_responder(Responder r) {
  std::lock_guard lock(mu_);
  responder_ = std::move(r);
}

void ScriptedChatProvider::set_latency(Clock* clock, Duration latency) {
  std::lock_guard lock(mu_);
  clock_ = clock;
  latency_ = latency;
}

CompletionResponse ScriptedChatProvider::complete(const CompletionRequest& request, Duration) {
  ++calls_;
  std::optional<Step> step;
  Responder responder;
  Clock* clock;
  Duration latency;
  {
    std::lock_guard lock(mu_);
    captured_.push_back(request);
    if (!script_.empty()) {
      step = std::move(script_.front());
      script_.pop_front();
    }
    responder = responder_;
    clock = clock_;
    latency = latency_;
  }
  if (clock && latency > Duration::zero()) clock->sleep_for(latency);
  if (step && step->transport_failure) throw TransportError("scripted transport failure");

  CompletionResponse resp;
  if (step) {
    resp.text = std::move(step->text);
  } else if (responder) {
    resp.text = responder(request);
  }
  resp.latency = latency;
  resp.completion_tokens = static_cast<int>(resp.text.size() / 4);
  resp.payload_hash = sha256_hex(resp.text);
  return resp;
}

std::vector<CompletionRequest> ScriptedChatProvider::captured() const {
  std::lock_guard lock(mu_);
  return captured_;
}

// ---- environment ----

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string{};
}

}  // namespace

std::optional<HttpEndpoint> chat_endpoint_from_env() {
  std::string url = env_or_empty("AMAFIA_LLM_URL");
  if (url.empty()) return std::nullopt;
  return HttpEndpoint{url, env_or_empty("AMAFIA_LLM_API_KEY")};
}

std::optional<HttpEndpoint> embedding_endpoint_from_env() {
  std::string url = env_or_empty("AMAFIA_EMBED_URL");
  if (url.empty()) return std::nullopt;
  std::string key = env_or_empty("AMAFIA_EMBED_API_KEY");
  if (key.empty()) key = env_or_empty("AMAFIA_LLM_API_KEY");
  return HttpEndpoint{url, key};
}

// ---- HttpChatProvider ----

HttpChatProvider::HttpChatProvider(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  detail::api_path(endpoint_.base_url, "");  // validates the URL early
}

CompletionResponse HttpChatProvider::complete(const CompletionRequest& request, Duration timeout) {
  if (request.params.no_repeat_ngram_size > 0) {
    std::call_once(ngram_warning_, [] {
      spdlog::warn("no_repeat_ngram_size has no standard chat-completion field; sending it as an "
                   "extension field, hosts without support will ignore it");
    });
  }
  const std::string body = canonical_request_json(request);
  auto reply = detail::post_json(endpoint_, detail::api_path(endpoint_.base_url, "/chat/completions"),
                                 body, timeout);
  if (reply.status != 200)
    throw Error(Errc::LLMUnavailable, "chat endpoint returned HTTP " + std::to_string(reply.status));

  CompletionResponse resp;
  resp.payload_hash = sha256_hex(reply.body);
  try {
    auto j = nlohmann::json::parse(reply.body);
    const auto& choice = j.at("choices").at(0);
    if (choice.contains("message"))
      resp.text = choice.at("message").value("content", std::string{});
    else
      resp.text = choice.value("text", std::string{});
    if (j.contains("usage")) {
      resp.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      resp.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed completion payload: ") + e.what());
  }
  return resp;
}

}  // namespace amafia
