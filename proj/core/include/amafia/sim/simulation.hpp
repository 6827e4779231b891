// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "amafia/archive/game_log.hpp"
#include "amafia/llm/providers.hpp"

// Offline games: scripted bots and mock-LLM agents on a VirtualClock. Used by
// the acceptance suite, benchmarks and `mafia-sim` to produce realistic logs
// with no network and no wall-clock waiting.
namespace amafia {

struct SimConfig {
  std::uint64_t seed = 0;
  int bots = 7;
  int agents = 1;
  Duration day_duration{std::chrono::seconds{120}};
  Duration night_duration{std::chrono::seconds{60}};
  int max_rounds = 15;
  Duration llm_latency{900};  // virtual time per mock completion
  bool survey = true;
  std::optional<std::filesystem::path> log_dir;
};

struct SimResult {
  GameLog log;
  Outcome outcome = Outcome::Ongoing;
  std::optional<std::filesystem::path> log_path;
  std::int64_t agent_iterations = 0;
};

/// Plays one complete game (and its survey) deterministically from `seed`.
SimResult run_simulated_game(const SimConfig& config);

/// Responder for ScriptedChatProvider that imitates the three agent prompt
/// types: random <send>/<wait> for the scheduler, a canned chat line for the
/// generator, and one of the offered names for the voter.
ScriptedChatProvider::Responder mock_agent_responder(std::uint64_t seed, double send_probability = 0.08);

}  // namespace amafia
