// SPDX-License-Identifier: Apache-2.0
#include "support/fixtures.hpp"

#include <algorithm>
#include <array>

#include "amafia/error.hpp"
#include "amafia/llm/providers.hpp"
#include "amafia/rng.hpp"

namespace fixtures {

using namespace amafia;

namespace {

constexpr std::array<const char*, 20> kNames = {"Alex",  "Blair", "Casey", "Dana",   "Eli",   "Frankie", "Gray",
                                                "Harper", "Indy", "Jules", "Kai",    "Lane",  "Morgan",  "Noel",
                                                "Oakley", "Parker", "Quinn", "Reese", "Sage", "Taylor"};

// Deliberately includes case/punctuation variants of the same words, unicode
// punctuation, full-width forms and extra spacing.
constexpr std::array<const char*, 22> kLines = {
    "hi",        "Hi!",          "hi",           "who is it?",   "Who is it",      "I think “Blair” is lying…",
    "¿qué?", "ok , fine", "  spaced   out  ", "vote Alex", "ALEX!!!", "it's me \u2014 no",
    "hmm",       "lol",          "no way",       "Agree.",       "agree",          "「test」",
    "ｗｈｙ？", "I was asleep", "Casey is quiet today", "same"};

}  // namespace

std::string seat_name(int i) { return kNames.at(static_cast<std::size_t>(i)); }
PlayerId seat_id(int i) { return PlayerId("p" + std::to_string(i + 1)); }

GameState make_state(int n, const std::set<int>& mafia, int agent, TimePoint start, Rules rules) {
  std::vector<Seat> seats;
  for (int i = 0; i < n; ++i) seats.push_back(Seat{seat_id(i), seat_name(i), i == agent});
  GameState s = new_game(rules, seats, start);
  for (int i = 0; i < n; ++i) {
    Player* p = s.find(seat_id(i));
    p->role = mafia.contains(i) ? Role::Mafia : Role::Bystander;
    p->is_agent = i == agent;
  }
  s.outcome = check_outcome(s);
  return s;
}

GameLog synthetic_log(std::uint64_t seed) {
  SeededRng rng(seed);
  const int n = 4 + static_cast<int>(rng.below(7));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span<int>(order));
  const std::set<int> mafia{order[0], order[1]};
  const int agent = rng.below(5) == 0 ? -1 : static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));

  LogHeader h;
  h.game_id = "syn-" + std::to_string(seed);
  h.source = "synthetic";
  h.started_at = t0();
  for (int i = 0; i < n; ++i)
    h.roster.push_back(RosterEntry{seat_id(i), seat_name(i), mafia.contains(i) ? Role::Mafia : Role::Bystander,
                                   i == agent});

  ArchiveWriter w;
  w.write_header(h);
  std::set<int> alive;
  for (int i = 0; i < n; ++i) alive.insert(i);
  TimePoint t = t0();
  Seq chat_seq = 0;
  std::optional<PlayerId> night_victim;

  const int rounds = 1 + static_cast<int>(rng.below(4));
  for (int round = 1; round <= rounds; ++round) {
    for (PhaseKind kind : {PhaseKind::Daytime, PhaseKind::Nighttime}) {
      const bool night = kind == PhaseKind::Nighttime;
      if (night && round == rounds && rng.below(3) == 0) break;
      PhaseEvent start{PhaseEvent::Edge::Start, round, kind, std::chrono::seconds{night ? 60 : 120}, std::nullopt};
      if (!night) start.revealed_victim = std::exchange(night_victim, std::nullopt);
      w.write_event(t, start);
      if (rng.below(2) == 0) {
        ChatMessage gm{++chat_seq, t, kGameManager, std::string(kGameManagerName), "Phase begins.", Scope::System,
                       round};
        w.write_event(t, MessageEvent{gm});
      }

      std::vector<int> speakers;
      for (int i : alive)
        if (!night || mafia.contains(i)) speakers.push_back(i);
      const int count = static_cast<int>(rng.below(12));
      for (int k = 0; k < count && !speakers.empty(); ++k) {
        if (rng.below(4) != 0) t += Duration{static_cast<std::int64_t>(rng.below(20000))};
        const int who = speakers[rng.below(speakers.size())];
        ChatMessage m{++chat_seq,
                      t,
                      seat_id(who),
                      seat_name(who),
                      kLines[rng.below(kLines.size())],
                      night ? Scope::NighttimeMafia : Scope::DaytimePublic,
                      round};
        w.write_event(t, MessageEvent{m});
        if (who == agent) {
          AgentDecisionRecord rec;
          rec.agent = seat_id(who);
          rec.phase_index = round;
          rec.phase_kind = kind;
          rec.decision = Decision::Send;
          rec.generated_text = m.content;
          rec.published_seq = m.seq;
          rec.started_at = t;
          w.write_event(t, AgentDecisionEvent{rec.agent, rec});
        }
      }

      t += Duration{1000};
      w.write_event(t, PhaseEvent{PhaseEvent::Edge::End, round, kind, std::chrono::seconds{night ? 60 : 120},
                                  std::nullopt});
      std::vector<int> targets;
      for (int i : alive)
        if (!night || !mafia.contains(i)) targets.push_back(i);
      const bool eliminate = night ? !targets.empty() : (rng.below(4) != 0 && !targets.empty());
      if (eliminate) {
        const int v = targets[rng.below(targets.size())];
        alive.erase(v);
        w.write_event(t, EliminationEvent{seat_id(v), round, kind, !night});
        if (night) night_victim = seat_id(v);
      }
    }
  }

  constexpr std::array<Outcome, 3> kOutcomes = {Outcome::MafiaWin, Outcome::BystanderWin, Outcome::Aborted};
  const Outcome outcome = kOutcomes[rng.below(kOutcomes.size())];
  t += Duration{10};
  w.write_outcome(t, OutcomeEvent{outcome, rounds});

  if (outcome != Outcome::Aborted && agent >= 0) {
    w.write_event(t, RevealEvent{{seat_name(agent)}});
    for (int i = 0; i < n; ++i) {
      if (i == agent || rng.below(5) == 0) continue;
      t += Duration{static_cast<std::int64_t>(rng.below(3000))};
      SurveyResponse r;
      r.respondent = seat_id(i);
      int guess = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (guess >= i) ++guess;
      r.guessed_agent = seat_name(guess);
      r.guessed_at = t;
      r.identified_agent = guess == agent;
      auto score = [&]() -> std::optional<int> {
        if (rng.below(7) == 0) return std::nullopt;
        return 1 + static_cast<int>(rng.below(5));
      };
      r.human_similarity = score();
      r.timing = score();
      r.relevance = score();
      r.partial = !r.human_similarity || !r.timing || !r.relevance;
      if (!r.partial) r.scored_at = t;
      w.write_event(t, SurveyEvent{r});
    }
  }
  return w.log();
}

FakeHost::FakeHost(GameState s, Clock& c) : state(std::move(s)), room(c.now()), clock(c) {}

AgentView FakeHost::agent_view(const PlayerId& agent) const {
  AgentView v;
  v.outcome = state.outcome;
  const Player* self = state.find(agent);
  if (!self) return v;
  v.alive = self->alive;
  v.phase = state.phase;
  v.tallied = state.tallied;
  v.admitted = state.admitted(agent);
  const bool night = state.phase.kind == PhaseKind::Nighttime;
  v.can_vote = self->alive && state.outcome == Outcome::Ongoing && !state.tallied &&
               (!night || self->role == Role::Mafia);
  v.has_voted = state.votes.contains(agent);
  v.n_active = static_cast<int>(state.admitted_speakers().size());
  for (const auto& p : state.players)
    if (p.alive && p.id != agent && (!night || p.role == Role::Bystander)) v.vote_candidates.push_back(p.character_name);
  return v;
}

ContextSnapshot FakeHost::snapshot(const PlayerId& agent) const {
  ++snapshot_calls;
  return room.visible_history(state, agent, std::nullopt, clock.now());
}

std::optional<Seq> FakeHost::publish(const PlayerId& agent, const std::string& text, const Phase& phase) {
  if (state.tallied || !(state.phase == phase) || !state.admitted(agent)) return std::nullopt;
  return room.append(state, agent, text, clock.now()).seq;
}

bool FakeHost::vote(const PlayerId& agent, const std::string& target_name) {
  const Player* target = state.find_by_name(target_name);
  if (!target) return false;
  try {
    state = cast_vote(state, agent, target->id, clock.now());
  } catch (const Error&) {
    return false;
  }
  votes.emplace_back(agent, target_name);
  return true;
}

Seq FakeHost::say(int seat, const std::string& text) { return room.append(state, seat_id(seat), text, clock.now()).seq; }

std::optional<std::string> isolation_trial(std::uint64_t seed) {
  SeededRng rng(seed);
  VirtualClock clock(t0());
  const int n = 7;
  const int agent = 6;
  FakeHost host(make_state(n, {0, 1}, agent, clock.now()), clock);
  const int before = static_cast<int>(rng.below(6));
  for (int i = 0; i < before; ++i) host.say(static_cast<int>(rng.below(n - 1)), "early " + std::to_string(i));

  const Duration latency{1 + static_cast<std::int64_t>(rng.below(3000))};
  const int words = 1 + static_cast<int>(rng.below(12));
  std::string text;
  for (int w = 0; w < words; ++w) text += (w ? " w" : "w") + std::to_string(w);
  auto provider = std::make_shared<ScriptedChatProvider>(std::vector<std::string>{"<send>", text});
  provider->set_latency(&clock, latency);

  const Duration typing = typing_delay(text, 1.0);
  const std::int64_t window = (2 * latency + typing).count();
  const int late = 1 + static_cast<int>(rng.below(5));
  std::vector<std::string> late_texts;
  for (int i = 0; i < late; ++i) {
    const auto at = clock.now() + Duration{static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(window)))};
    late_texts.push_back("late-" + std::to_string(i) + "-" + std::to_string(seed));
    const int who = static_cast<int>(rng.below(n - 1));
    clock.schedule_at(at, [&host, who, t = late_texts.back()] { host.say(who, t); });
  }

  LlmGateway gateway(provider, clock);
  AgentProfile profile{seat_id(agent), seat_name(agent), Role::Bystander, "", 1.0};
  AgentRuntime runtime(profile, AgentConfig{}, gateway, clock, PromptForge{}, seed);
  const AgentDecisionRecord rec = runtime.run_iteration(host);

  if (rec.snapshot_seq != before) return "snapshot_seq " + std::to_string(rec.snapshot_seq);
  if (!rec.generator_prompt) return std::string("no generator prompt");
  if (rec.generator_prompt->snapshot_seq != rec.scheduler_prompt.snapshot_seq)
    return std::string("prompts built from different snapshots");
  const auto expected = PromptForge{}.render_history(host.room.visible_history(host.state, seat_id(agent), before));
  for (const auto* b : {&rec.scheduler_prompt, &*rec.generator_prompt}) {
    if (b->user_text.find(expected) == std::string::npos) return std::string("history block differs from snapshot");
    for (const auto& t : late_texts)
      if (b->user_text.find(t) != std::string::npos) return "late message leaked: " + t;
  }
  if (!rec.published_seq) return std::string("message was not published");
  if (!rec.published_at || !rec.generation_completed_at) return std::string("missing timestamps");
  if (*rec.published_at - *rec.generation_completed_at != typing)
    return "typing delay " + std::to_string((*rec.published_at - *rec.generation_completed_at).count());
  if (rec.typing_delay != typing) return std::string("recorded typing delay mismatch");
  const auto& msgs = host.room.messages();
  const auto it = std::find_if(msgs.begin(), msgs.end(), [&](const ChatMessage& m) { return m.seq == *rec.published_seq; });
  if (it == msgs.end() || it->content != text) return std::string("published content mismatch");
  return std::nullopt;
}

}  // namespace fixtures
