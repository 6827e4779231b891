// SPDX-License-Identifier: Apache-2.0
#include <spdlog/spdlog.h>

namespace {

// Session lifecycle logs are info level; keep test output to failures.
const bool quiet = [] {
  spdlog::set_level(spdlog::level::warn);
  return true;
}();

}  // namespace
