// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amafia/archive/game_log.hpp"

namespace amafia::stats {

enum class PlayerType : std::uint8_t { Human, Llm };
std::string_view to_string(PlayerType t) noexcept;

struct ViewPlayer {
  PlayerId id;
  std::string name;
  Role role = Role::Bystander;
  PlayerType type = PlayerType::Human;
};

struct ViewMessage {
  TimePoint ts{};
  PlayerId author;
  Scope scope = Scope::DaytimePublic;
  int phase_index = 0;
  std::string content;
};

struct ViewPhase {
  int index = 0;
  PhaseKind kind = PhaseKind::Daytime;
  std::set<PlayerId> living;  // alive when the phase started
  std::optional<PlayerId> eliminated;
};

/// Analysis-friendly projection of one GameLog: player messages only (no
/// Game-Manager lines), phases with their living rosters, and the survey.
struct GameView {
  std::string game_id;
  std::vector<ViewPlayer> players;
  std::vector<ViewMessage> messages;  // log order
  std::vector<ViewPhase> phases;      // start order
  Outcome outcome = Outcome::Ongoing;
  std::vector<SurveyResponse> survey;

  const ViewPlayer* player(const PlayerId& id) const;
};

GameView build_view(const GameLog& log);

}  // namespace amafia::stats
