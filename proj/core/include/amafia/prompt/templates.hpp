// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace amafia::templates {

/// Raw prompt assets keyed by file stem (e.g. "scheduler_user").
const std::map<std::string_view, std::string_view>& all();

/// Throws Error(UnknownPlaceholder) if `name` is not a bundled asset.
std::string_view get(std::string_view name);

using Bindings = std::vector<std::pair<std::string_view, std::string_view>>;

/// Single-pass `{{key}}` substitution; inserted values are never rescanned,
/// so chat content containing braces is safe. Unbound keys throw.
std::string render(std::string_view tpl, const Bindings& bindings);

}  // namespace amafia::templates
