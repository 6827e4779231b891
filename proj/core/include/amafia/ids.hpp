// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <functional>
#include <string>

namespace amafia {

/// Opaque participant identifier (session-scoped, never shown to players).
struct PlayerId {
  std::string value;

  PlayerId() = default;
  explicit PlayerId(std::string v) : value(std::move(v)) {}

  bool empty() const noexcept { return value.empty(); }
  auto operator<=>(const PlayerId&) const = default;
};

}  // namespace amafia

template <>
struct std::hash<amafia::PlayerId> {
  std::size_t operator()(const amafia::PlayerId& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};
