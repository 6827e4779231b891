// SPDX-License-Identifier: Apache-2.0
#include "http_client.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <regex>

#include "amafia/error.hpp"

namespace amafia::detail {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path part without trailing slash
};

SplitUrl split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(Errc::InvalidConfig, "bad endpoint URL '" + url + "'");
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

}  // namespace

std::string api_path(const std::string& base_url, const std::string& suffix) {
  std::string prefix = split_url(base_url).prefix;
  if (prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0) return prefix + suffix;
  return prefix + "/v1" + suffix;
}

HttpReply post_json(const HttpEndpoint& endpoint, const std::string& path, const std::string& body,
                    Duration timeout) {
  const SplitUrl url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

  auto res = client.Post(path, headers, body, "application/json");
  if (!res) throw TransportError("HTTP request failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + url.origin);
  return {res->status, res->body};
}

}  // namespace amafia::detail
