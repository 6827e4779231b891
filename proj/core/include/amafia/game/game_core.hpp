// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amafia/clock.hpp"
#include "amafia/ids.hpp"

// Mafia rules as a pure state machine. Every operation takes a GameState by
// value and returns the successor; nothing here touches clocks, sockets or
// threads. The game server serializes all calls per game.
namespace amafia {

enum class Role : std::uint8_t { Mafia, Bystander };
enum class PhaseKind : std::uint8_t { Daytime, Nighttime };
enum class Outcome : std::uint8_t { Ongoing, MafiaWin, BystanderWin, Aborted };

std::string_view to_string(Role r) noexcept;
std::string_view to_string(PhaseKind k) noexcept;
std::string_view to_string(Outcome o) noexcept;
Role parse_role(std::string_view s);
PhaseKind parse_phase_kind(std::string_view s);
Outcome parse_outcome(std::string_view s);

inline constexpr int kMinPlayers = 4;
inline constexpr int kMaxPlayers = 20;

/// 2 mafia up to 10 players, 3 above.
constexpr int mafia_count_for(int players) noexcept { return players <= 10 ? 2 : 3; }

struct Rules {
  Duration day_duration{std::chrono::seconds{120}};
  Duration night_duration{std::chrono::seconds{60}};
  int max_rounds = 15;
  std::uint64_t rng_seed = 0;
};

/// A participant as it enters the game, in join order.
struct Seat {
  PlayerId id;
  std::string character_name;
  bool is_agent = false;
};

struct Player {
  PlayerId id;
  std::string character_name;
  Role role = Role::Bystander;
  bool is_agent = false;
  bool alive = true;
};

struct Phase {
  int index = 1;  // round number; day and night of one round share it
  PhaseKind kind = PhaseKind::Daytime;
  TimePoint start{};
  Duration duration{};

  TimePoint deadline() const { return start + duration; }
  bool operator==(const Phase&) const = default;
};

struct Vote {
  PlayerId voter;
  PlayerId target;
  TimePoint timestamp{};
  int phase_index = 0;
  PhaseKind kind = PhaseKind::Daytime;
};

struct PhaseRecord {
  int phase_index = 0;
  PhaseKind kind = PhaseKind::Daytime;
  std::optional<PlayerId> eliminated;
};

struct GameState {
  std::vector<Player> players;  // join order
  Phase phase;
  std::map<PlayerId, Vote> votes;  // current phase, latest vote per voter
  std::vector<PhaseRecord> history;
  Outcome outcome = Outcome::Ongoing;
  Rules rules;
  bool tallied = false;
  std::optional<PlayerId> pending_victim;  // night kill not yet announced

  const Player* find(const PlayerId& id) const;
  Player* find(const PlayerId& id);
  const Player* find_by_name(std::string_view character_name) const;
  int living(Role role) const;
  int living() const;
  std::vector<PlayerId> living_ids() const;
  std::vector<PlayerId> mafia_ids() const;
  /// Living players allowed to talk in the current phase.
  std::vector<PlayerId> admitted_speakers() const;
  bool admitted(const PlayerId& id) const;
};

struct TallyResult {
  GameState state;
  std::optional<PlayerId> eliminated;
  std::map<PlayerId, int> counts;
};

struct PhaseTransition {
  GameState state;
  Phase from;
  Phase to;
  std::optional<PlayerId> revealed_victim;  // set on Nighttime -> Daytime
};

/// Assigns roles with the seeded RNG. Throws TooFewPlayers / TooManyPlayers,
/// InvalidConfig on duplicate ids or names.
GameState new_game(const Rules& rules, std::span<const Seat> seats, TimePoint start);

/// Records (or replaces) `voter`'s vote for the current phase.
GameState cast_vote(GameState state, const PlayerId& voter, const PlayerId& target, TimePoint now);

/// Closes the current phase. Throws PhaseStillOpen before the deadline,
/// GameFinished if the game is already decided.
TallyResult tally_and_eliminate(GameState state, TimePoint now);

/// Pure outcome evaluation; an Aborted game stays Aborted.
Outcome check_outcome(const GameState& state);

/// Moves to the next phase starting at `now`. Throws PhaseStillOpen if the
/// current phase was not tallied and GameFinished if outcome != Ongoing.
PhaseTransition advance_phase(GameState state, TimePoint now);

/// Vote counts of the current phase restricted to living voters/targets.
std::map<PlayerId, int> current_counts(const GameState& state);

}  // namespace amafia
