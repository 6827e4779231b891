// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "amafia/agent/agent_runtime.hpp"
#include "amafia/archive/game_log.hpp"
#include "amafia/chat/chat_room.hpp"
#include "amafia/clock.hpp"
#include "amafia/game/game_core.hpp"

namespace fixtures {

inline amafia::TimePoint t0() { return amafia::from_millis(1'700'000'000'000); }

/// Players p1..pn named Alex, Blair, ...; `mafia` holds 0-based seat indices.
/// Seat `agent` (if >= 0) is flagged as the agent.
amafia::GameState make_state(int n, const std::set<int>& mafia, int agent = -1,
                             amafia::TimePoint start = t0(), amafia::Rules rules = {});

std::string seat_name(int i);
amafia::PlayerId seat_id(int i);

/// Random but schema-valid log: phases, messages (ties in time, unicode
/// punctuation, duplicates), eliminations, agent decisions paired with agent
/// messages, survey responses and an outcome (sometimes Aborted).
amafia::GameLog synthetic_log(std::uint64_t seed);

/// Minimal AgentHost over a real GameState + ChatRoom.
class FakeHost : public amafia::AgentHost {
 public:
  FakeHost(amafia::GameState state, amafia::Clock& clock);

  amafia::AgentView agent_view(const amafia::PlayerId& agent) const override;
  amafia::ContextSnapshot snapshot(const amafia::PlayerId& agent) const override;
  std::optional<amafia::Seq> publish(const amafia::PlayerId& agent, const std::string& text,
                                     const amafia::Phase& phase) override;
  bool vote(const amafia::PlayerId& agent, const std::string& target_name) override;
  void record_decision(const amafia::AgentDecisionRecord& record) override { decisions.push_back(record); }
  void record_vote(const amafia::AgentVoteRecord& record) override { vote_records.push_back(record); }

  /// Appends a player message at the clock's current time.
  amafia::Seq say(int seat, const std::string& text);

  amafia::GameState state;
  amafia::ChatRoom room;
  amafia::Clock& clock;
  std::vector<amafia::AgentDecisionRecord> decisions;
  std::vector<amafia::AgentVoteRecord> vote_records;
  std::vector<std::pair<amafia::PlayerId, std::string>> votes;
  mutable int snapshot_calls = 0;
};

/// One randomized run of a Send iteration while other players keep posting
/// during the LLM calls and the typing delay. Returns a description of the
/// first violated property (snapshot isolation, publish-anyway, exact typing
/// delay), or nullopt.
std::optional<std::string> isolation_trial(std::uint64_t seed);

}  // namespace fixtures
