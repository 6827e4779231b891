// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "amafia/error.hpp"
#include "amafia/llm/embedding.hpp"
#include "amafia/llm/gateway.hpp"
#include "amafia/llm/providers.hpp"

using namespace amafia;

namespace {

// A local OpenAI-style mock. Handlers see the parsed body and the
// Authorization header; `fail_next` answers that many requests with 503.
class MockApi {
 public:
  MockApi() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      if (refuse(res)) return;
      record(req);
      const auto body = nlohmann::json::parse(req.body);
      const std::string last = body.at("messages").back().at("content");
      res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "re: " + last}}}}}},
                                     {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 3}}}}
                          .dump(),
                      "application/json");
    });
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      if (refuse(res)) return;
      record(req);
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json data = nlohmann::json::array();
      const auto& input = body.at("input");
      // Reverse order on the wire; the client must sort by index.
      for (std::size_t i = input.size(); i-- > 0;) {
        const std::string t = input[i];
        data.push_back({{"index", i}, {"embedding", {static_cast<double>(t.size()), 1.0, -1.0}}});
      }
      res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });
    server_.Post("/bad/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.status = 400;
      res.set_content("{\"error\":\"nope\"}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockApi() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }

  std::atomic<int> fail_next{0};
  std::mutex mu;
  std::vector<nlohmann::json> bodies;
  std::vector<std::string> auth;

 private:
  bool refuse(httplib::Response& res) {
    if (fail_next.load() <= 0) return false;
    --fail_next;
    res.status = 503;
    return true;
  }
  void record(const httplib::Request& req) {
    std::lock_guard lock(mu);
    bodies.push_back(nlohmann::json::parse(req.body));
    auth.push_back(req.get_header_value("Authorization"));
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

CompletionRequest sample_request() {
  return CompletionRequest{"test-model", {{"system", "be brief"}, {"user", "hello"}}, generator_decoding()};
}

}  // namespace

TEST(HttpChatProvider, RoundTripCarriesParamsAndKey) {
  MockApi api;
  HttpChatProvider p(HttpEndpoint{api.url(), "k-123"});
  const auto r = p.complete(sample_request(), Duration{5000});
  EXPECT_EQ(r.text, "re: hello");
  EXPECT_EQ(r.prompt_tokens, 11);
  EXPECT_EQ(r.completion_tokens, 3);
  ASSERT_EQ(api.bodies.size(), 1u);
  const auto& body = api.bodies[0];
  EXPECT_EQ(body.at("model"), "test-model");
  EXPECT_EQ(body.at("max_tokens"), 25);
  EXPECT_DOUBLE_EQ(body.at("temperature").get<double>(), 1.3);
  EXPECT_DOUBLE_EQ(body.at("repetition_penalty").get<double>(), 1.25);
  EXPECT_EQ(body.at("no_repeat_ngram_size"), 8);
  EXPECT_EQ(api.auth[0], "Bearer k-123");
}

TEST(HttpChatProvider, BaseUrlMayIncludeV1) {
  MockApi api;
  HttpChatProvider p(HttpEndpoint{api.url("/v1"), ""});
  EXPECT_EQ(p.complete(sample_request(), Duration{5000}).text, "re: hello");
  EXPECT_EQ(api.auth[0], "");
}

TEST(HttpChatProvider, ServerErrorsAreRetriedByTheGateway) {
  MockApi api;
  api.fail_next = 2;
  VirtualClock clock;
  LlmGateway gw(std::make_shared<HttpChatProvider>(HttpEndpoint{api.url(), ""}), clock);
  const auto r = gw.complete(sample_request());
  EXPECT_EQ(r.text, "re: hello");
  EXPECT_EQ(r.attempts, 3);
}

TEST(HttpChatProvider, ClientErrorIsUnavailable) {
  MockApi api;
  HttpChatProvider p(HttpEndpoint{api.url("/bad"), ""});
  try {
    p.complete(sample_request(), Duration{5000});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LLMUnavailable);
  }
}

TEST(HttpChatProvider, UnreachableHostIsTransportError) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpChatProvider p(HttpEndpoint{"http://127.0.0.1:" + std::to_string(port), ""});
  EXPECT_THROW(p.complete(sample_request(), Duration{1000}), TransportError);
}

TEST(HttpEmbeddingProvider, OrdersByIndexAndFeedsTheEmbedder) {
  MockApi api;
  auto provider = std::make_shared<HttpEmbeddingProvider>(HttpEndpoint{api.url(), ""}, "embed-model");
  Embedder e(provider, std::nullopt, 2);
  const std::vector<std::string> texts{"a", "bbb", "cc"};
  const auto out = e.embed(texts);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_DOUBLE_EQ(out[0].values[0], 1);
  EXPECT_DOUBLE_EQ(out[1].values[0], 3);
  EXPECT_DOUBLE_EQ(out[2].values[0], 2);
  EXPECT_EQ(out[0].model_id, "embed-model");
  ASSERT_EQ(api.bodies.size(), 2u);
  EXPECT_EQ(api.bodies[0].at("model"), "embed-model");
  EXPECT_EQ(api.bodies[0].at("input").size(), 2u);
}

TEST(HttpEmbeddingProvider, OutageIsEmbeddingUnavailable) {
  MockApi api;
  api.fail_next = 100;
  auto provider = std::make_shared<HttpEmbeddingProvider>(HttpEndpoint{api.url(), ""}, "m");
  Embedder e(provider, std::nullopt);
  const std::vector<std::string> texts{"x"};
  try {
    e.embed(texts);
    FAIL() << "expected an error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::EmbeddingUnavailable);
  }
}
