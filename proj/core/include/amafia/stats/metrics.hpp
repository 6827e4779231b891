// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "amafia/stats/game_view.hpp"

namespace amafia::stats {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;         // population or sample, per StdKind
  double alt_std = 0.0;     // the other convention
};

enum class StdKind : std::uint8_t { Population, Sample };

Summary summarize(std::span<const double> xs, StdKind kind = StdKind::Population);

template <typename V>
using ByType = std::map<PlayerType, V>;

// ---- Table 1 ----

struct DatasetOverview {
  std::size_t games = 0;
  std::size_t total_messages = 0;
  double avg_phases = 0.0;
  double avg_players = 0.0;
  double avg_messages = 0.0;
  double avg_agent_messages = 0.0;
};

DatasetOverview dataset_overview(std::span<const GameView> games);

// ---- Table 2 ----

/// One observation per (player, daytime phase) the player was alive in.
/// Throws NoDaytimePhases when no log has a daytime phase.
ByType<std::vector<double>> msgs_per_player_per_day_phase(std::span<const GameView> games);

// ---- Figure 4 ----

struct PhaseIndexPoint {
  int day_index = 0;
  Summary summary;
};

/// Mean messages per living player for each daytime index, pooled over games.
std::vector<PhaseIndexPoint> msgs_per_player_by_phase_index(std::span<const GameView> games,
                                                            StdKind kind = StdKind::Population);

// ---- Figure 5 ----

struct TimeGap {
  std::string game_id;
  PlayerId player;
  PlayerType type = PlayerType::Human;
  double mean_seconds = 0.0;
};

struct TimeDiffs {
  std::vector<TimeGap> other;  // gap to the latest earlier message by someone else in the player's scope
  std::vector<TimeGap> self;   // gap between own consecutive messages
};

TimeDiffs mean_time_diffs(std::span<const GameView> games);

// ---- Table 3 ----

/// Lowercase (ASCII), drop ASCII and common Unicode punctuation, collapse
/// whitespace, trim.
std::string normalize_text(std::string_view text);
std::vector<std::string> whitespace_tokens(std::string_view text);

struct ContentObservation {
  std::string game_id;
  PlayerId player;
  PlayerType type = PlayerType::Human;
  double words_per_message = 0.0;
  double repeated_messages = 0.0;
  double unique_words = 0.0;
};

/// Players with at least one message.
std::vector<ContentObservation> content_stats(std::span<const GameView> games);

// ---- Figure 7 ----

struct WinCell {
  std::size_t wins = 0;
  std::size_t games = 0;
  double percent() const { return games ? 100.0 * static_cast<double>(wins) / static_cast<double>(games) : 0.0; }
};

/// Keyed by (player type, role). Aborted and unfinished games are skipped.
std::map<std::pair<PlayerType, Role>, WinCell> win_rates(std::span<const GameView> games);

// ---- Figure 8 ----

enum class TieRule : std::uint8_t { Average, Min };

struct EliminationRank {
  std::string game_id;
  int day_index = 0;
  PlayerId eliminated;
  double normalized_rank = 0.0;
};

/// Rank (fewest = 0) of `counts[target]` among `counts`, normalized by
/// (size - 1). Requires counts.size() >= 2.
double normalized_rank(std::span<const int> counts, std::size_t target, TieRule rule = TieRule::Average);

std::vector<EliminationRank> vote_out_speaking_rank(std::span<const GameView> games, TieRule rule = TieRule::Average);
/// 10 equal bins over [0, 1]; 1.0 falls in the last bin.
std::array<std::size_t, 10> rank_histogram(std::span<const EliminationRank> ranks);

// ---- Table 5 ----

struct SurveyReport {
  bool present = false;
  std::size_t guesses = 0;
  std::size_t correct = 0;
  double identification_percent = 0.0;
  Summary human_similarity;
  Summary timing;
  Summary relevance;
};

SurveyReport survey_report(std::span<const GameView> games, StdKind kind = StdKind::Population);

}  // namespace amafia::stats
