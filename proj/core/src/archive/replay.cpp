// SPDX-License-Identifier: Apache-2.0
#include <set>
#include <tuple>

#include "amafia/archive/game_log.hpp"
#include "amafia/error.hpp"

namespace amafia {

namespace {

using ElimKey = std::tuple<int, PhaseKind, std::string>;

std::string describe(const ElimKey& k) {
  return std::get<2>(k) + " in " + std::string(to_string(std::get<1>(k))) + " " + std::to_string(std::get<0>(k));
}

}  // namespace

ReplayResult replay_log(const GameLog& log) {
  ReplayResult result;
  std::vector<Seat> seats;
  for (const auto& r : log.header.roster) seats.push_back({r.id, r.character_name, r.is_agent});

  GameState state;
  try {
    state = new_game(log.header.rules, seats, log.header.started_at);
  } catch (const Error& e) {
    result.mismatches.push_back(std::string("cannot start game: ") + e.what());
    return result;
  }

  result.roles_match = true;
  for (const auto& r : log.header.roster) {
    const Player* p = state.find(r.id);
    if (!p || p->role != r.role) {
      result.roles_match = false;
      result.mismatches.push_back("role of " + r.character_name + " differs from seeded assignment");
    }
  }

  std::set<ElimKey> logged;
  std::set<ElimKey> replayed;
  std::optional<Outcome> logged_outcome;

  for (const auto& rec : log.events) {
    try {
      if (const auto* v = rec.as<VoteEvent>()) {
        state = cast_vote(std::move(state), v->vote.voter, v->vote.target, v->vote.timestamp);
      } else if (const auto* p = rec.as<PhaseEvent>()) {
        if (p->edge == PhaseEvent::Edge::End) {
          auto tally = tally_and_eliminate(std::move(state), rec.ts);
          state = std::move(tally.state);
          if (tally.eliminated) replayed.insert({p->phase_index, p->kind, tally.eliminated->value});
        } else if (state.tallied) {
          state = advance_phase(std::move(state), rec.ts).state;
          if (state.phase.index != p->phase_index || state.phase.kind != p->kind)
            result.mismatches.push_back("phase sequence diverges at seq " + std::to_string(rec.seq));
        }
      } else if (const auto* e = rec.as<EliminationEvent>()) {
        logged.insert({e->phase_index, e->kind, e->player.value});
      } else if (const auto* o = rec.as<OutcomeEvent>()) {
        logged_outcome = o->outcome;
        // A round-limit abort has no following phase start in the log.
        if (state.outcome == Outcome::Ongoing && state.tallied)
          state = advance_phase(std::move(state), rec.ts).state;
      }
    } catch (const Error& e) {
      result.mismatches.push_back("seq " + std::to_string(rec.seq) + ": " + e.what());
    }
  }

  result.eliminations_match = logged == replayed;
  if (!result.eliminations_match) {
    for (const auto& k : logged)
      if (!replayed.contains(k)) result.mismatches.push_back("logged elimination not reproduced: " + describe(k));
    for (const auto& k : replayed)
      if (!logged.contains(k)) result.mismatches.push_back("replay eliminated " + describe(k) + " but log did not");
  }
  result.replayed_outcome = state.outcome;
  result.outcome_match = logged_outcome && *logged_outcome == state.outcome;
  if (!result.outcome_match)
    result.mismatches.push_back("outcome: log " +
                                std::string(logged_outcome ? to_string(*logged_outcome) : "missing") +
                                ", replay " + std::string(to_string(state.outcome)));
  return result;
}

}  // namespace amafia
