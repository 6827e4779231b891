// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "amafia/agent/agent_runtime.hpp"
#include "amafia/game/game_core.hpp"

namespace amafia {

inline constexpr int kGameConfigSchema = 1;

struct GameConfig {
  int schema_version = kGameConfigSchema;
  int roster_size = 8;  // all seats, agents included
  Duration day_duration{std::chrono::seconds{120}};
  Duration night_duration{std::chrono::seconds{60}};
  int max_rounds = 15;
  std::uint64_t rng_seed = 0;
  int agent_count = 1;
  AgentConfig agent;
  std::string consent_version = "v1";
  std::vector<std::string> name_pool;  // empty -> default_name_pool()
  std::chrono::minutes prompt_utc_offset{0};
  /// After the game ends, the agent's identity is revealed once every human
  /// has guessed or this window elapses; scores are accepted for the same
  /// length of time after the reveal.
  Duration survey_window{std::chrono::minutes{10}};

  Rules rules() const { return Rules{day_duration, night_duration, max_rounds, rng_seed}; }

  /// Throws InvalidConfig.
  void validate() const;
};

std::span<const std::string> default_name_pool();

/// Participation consent text for a version id ("v1").
std::string_view consent_text(std::string_view version);

nlohmann::json to_json(const GameConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected so typos
/// surface. Throws InvalidConfig.
GameConfig game_config_from_json(const nlohmann::json& j);
GameConfig load_game_config(const std::filesystem::path& path);

nlohmann::json to_json(const DecodingParams& p);
DecodingParams decoding_params_from_json(const nlohmann::json& j, DecodingParams defaults);

}  // namespace amafia
