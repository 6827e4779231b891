// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "amafia/clock.hpp"
#include "amafia/llm/providers.hpp"

namespace amafia::detail {

struct HttpReply {
  int status = 0;
  std::string body;
};

/// POSTs JSON to `endpoint.base_url + path`. Connection failures, timeouts,
/// 429 and 5xx raise TransportError; any other status is returned.
HttpReply post_json(const HttpEndpoint& endpoint, const std::string& path, const std::string& body,
                    Duration timeout);

/// Joins an API path onto a base URL that may already end in "/v1".
std::string api_path(const std::string& base_url, const std::string& suffix);

}  // namespace amafia::detail
