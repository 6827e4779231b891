// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "amafia/game/game_core.hpp"
#include "amafia/ids.hpp"

namespace amafia {

/// The agent's in-game identity plus the knobs that shape its prompts.
struct AgentProfile {
  PlayerId player_id;
  std::string character_name;
  Role role = Role::Bystander;
  std::string personality_text;  // empty selects the bundled default
  double words_per_second = 1.0;
};

}  // namespace amafia
