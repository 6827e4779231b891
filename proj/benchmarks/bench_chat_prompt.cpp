// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "amafia/agent/profile.hpp"
#include "amafia/chat/chat_room.hpp"
#include "amafia/game/game_core.hpp"
#include "amafia/prompt/prompt_forge.hpp"

using namespace amafia;

namespace {

GameState eight_players(TimePoint start) {
  std::vector<Seat> seats;
  for (int i = 0; i < 8; ++i) seats.push_back(Seat{PlayerId("p" + std::to_string(i)), "Name" + std::to_string(i), i == 7});
  Rules rules;
  rules.rng_seed = 5;
  return new_game(rules, seats, start);
}

ChatRoom filled_room(const GameState& g, int messages) {
  ChatRoom room(g.phase.start);
  for (int i = 0; i < messages; ++i)
    room.append(g, g.players[static_cast<std::size_t>(i % 8)].id, "message number " + std::to_string(i),
                g.phase.start + Duration{i * 100});
  return room;
}

}  // namespace

static void BM_ChatAppend(benchmark::State& state) {
  const auto g = eight_players(from_millis(0));
  for (auto _ : state) {
    ChatRoom room(g.phase.start);
    for (int i = 0; i < state.range(0); ++i)
      room.append(g, g.players[static_cast<std::size_t>(i % 8)].id, "hello there", g.phase.start + Duration{i});
    benchmark::DoNotOptimize(room.last_seq());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChatAppend)->Arg(100)->Arg(1000);

static void BM_VisibleHistory(benchmark::State& state) {
  const auto g = eight_players(from_millis(0));
  const auto room = filled_room(g, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(room.visible_history(g, g.players[7].id));
}
BENCHMARK(BM_VisibleHistory)->Arg(100)->Arg(1000);

static void BM_RenderPrompts(benchmark::State& state) {
  const auto g = eight_players(from_millis(0));
  const auto room = filled_room(g, static_cast<int>(state.range(0)));
  const auto snap = room.visible_history(g, g.players[7].id);
  const AgentProfile agent{g.players[7].id, g.players[7].character_name, g.players[7].role, "", 1.0};
  const PromptForge forge;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forge.build_scheduler_prompt(snap, agent, PromptVariant::SchedulerListener));
    benchmark::DoNotOptimize(forge.build_generator_prompt(snap, agent));
  }
}
BENCHMARK(BM_RenderPrompts)->Arg(100)->Arg(1000);
