// SPDX-License-Identifier: Apache-2.0
#include "amafia/game/game_core.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "amafia/error.hpp"
#include "amafia/rng.hpp"

namespace amafia {

std::string_view to_string(Role r) noexcept {
  return r == Role::Mafia ? "mafia" : "bystander";
}

std::string_view to_string(PhaseKind k) noexcept {
  return k == PhaseKind::Daytime ? "Daytime" : "Nighttime";
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Ongoing: return "Ongoing";
    case Outcome::MafiaWin: return "MafiaWin";
    case Outcome::BystanderWin: return "BystanderWin";
    case Outcome::Aborted: return "Aborted";
  }
  return "?";
}

Role parse_role(std::string_view s) {
  if (s == "mafia") return Role::Mafia;
  if (s == "bystander") return Role::Bystander;
  throw Error(Errc::SchemaViolation, "unknown role '" + std::string(s) + "'");
}

PhaseKind parse_phase_kind(std::string_view s) {
  if (s == "Daytime") return PhaseKind::Daytime;
  if (s == "Nighttime") return PhaseKind::Nighttime;
  throw Error(Errc::SchemaViolation, "unknown phase kind '" + std::string(s) + "'");
}

Outcome parse_outcome(std::string_view s) {
  for (Outcome o : {Outcome::Ongoing, Outcome::MafiaWin, Outcome::BystanderWin, Outcome::Aborted})
    if (to_string(o) == s) return o;
  throw Error(Errc::SchemaViolation, "unknown outcome '" + std::string(s) + "'");
}

// ---- GameState queries ----

const Player* GameState::find(const PlayerId& id) const {
  auto it = std::find_if(players.begin(), players.end(), [&](const Player& p) { return p.id == id; });
  return it == players.end() ? nullptr : &*it;
}

Player* GameState::find(const PlayerId& id) {
  return const_cast<Player*>(std::as_const(*this).find(id));
}

const Player* GameState::find_by_name(std::string_view name) const {
  auto it = std::find_if(players.begin(), players.end(),
                         [&](const Player& p) { return p.character_name == name; });
  return it == players.end() ? nullptr : &*it;
}

int GameState::living(Role role) const {
  return static_cast<int>(std::count_if(players.begin(), players.end(),
                                        [&](const Player& p) { return p.alive && p.role == role; }));
}

int GameState::living() const {
  return static_cast<int>(
      std::count_if(players.begin(), players.end(), [](const Player& p) { return p.alive; }));
}

std::vector<PlayerId> GameState::living_ids() const {
  std::vector<PlayerId> out;
  for (const auto& p : players)
    if (p.alive) out.push_back(p.id);
  return out;
}

std::vector<PlayerId> GameState::mafia_ids() const {
  std::vector<PlayerId> out;
  for (const auto& p : players)
    if (p.role == Role::Mafia) out.push_back(p.id);
  return out;
}

bool GameState::admitted(const PlayerId& id) const {
  const Player* p = find(id);
  if (!p || !p->alive || outcome != Outcome::Ongoing) return false;
  return phase.kind == PhaseKind::Daytime || p->role == Role::Mafia;
}

std::vector<PlayerId> GameState::admitted_speakers() const {
  std::vector<PlayerId> out;
  for (const auto& p : players)
    if (admitted(p.id)) out.push_back(p.id);
  return out;
}

// ---- operations ----

GameState new_game(const Rules& rules, std::span<const Seat> seats, TimePoint start) {
  const int n = static_cast<int>(seats.size());
  if (n < kMinPlayers)
    throw Error(Errc::TooFewPlayers, "need at least " + std::to_string(kMinPlayers) + " players, got " +
                                         std::to_string(n));
  if (n > kMaxPlayers)
    throw Error(Errc::TooManyPlayers, "at most " + std::to_string(kMaxPlayers) + " players supported");
  if (rules.day_duration <= Duration::zero() || rules.night_duration <= Duration::zero() ||
      rules.max_rounds < 1)
    throw Error(Errc::InvalidConfig, "phase durations and max_rounds must be positive");

  std::set<PlayerId> ids;
  std::set<std::string> names;
  for (const auto& s : seats) {
    if (s.id.empty() || !ids.insert(s.id).second)
      throw Error(Errc::InvalidConfig, "duplicate or empty participant id");
    if (s.character_name.empty() || !names.insert(s.character_name).second)
      throw Error(Errc::InvalidConfig, "duplicate or empty character name");
  }

  std::vector<int> order(seats.size());
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(derive_seed(rules.rng_seed, 0x726f6c6573ULL));
  rng.shuffle(std::span<int>(order));

  GameState st;
  st.rules = rules;
  st.players.reserve(seats.size());
  for (const auto& s : seats) st.players.push_back(Player{s.id, s.character_name, Role::Bystander, s.is_agent, true});
  const int mafia = mafia_count_for(n);
  for (int i = 0; i < mafia; ++i) st.players[order[i]].role = Role::Mafia;

  st.phase = Phase{1, PhaseKind::Daytime, start, rules.day_duration};
  st.outcome = check_outcome(st);
  return st;
}

GameState cast_vote(GameState st, const PlayerId& voter, const PlayerId& target, TimePoint now) {
  if (st.outcome != Outcome::Ongoing) throw Error(Errc::GameFinished, "game is over");
  const Player* v = st.find(voter);
  if (!v) throw Error(Errc::UnknownPlayer, "unknown voter");
  const Player* t = st.find(target);
  if (!t) throw Error(Errc::UnknownPlayer, "unknown vote target");
  if (st.tallied || now > st.phase.deadline()) throw Error(Errc::NotPermitted, "voting is closed");
  if (!v->alive) throw Error(Errc::NotPermitted, "eliminated players cannot vote");
  if (st.phase.kind == PhaseKind::Nighttime && v->role != Role::Mafia)
    throw Error(Errc::NotPermitted, "only mafia vote at night");
  if (!t->alive) throw Error(Errc::InvalidTarget, "target is not alive");
  if (voter == target) throw Error(Errc::InvalidTarget, "self-votes are not allowed");
  if (st.phase.kind == PhaseKind::Nighttime && t->role == Role::Mafia)
    throw Error(Errc::InvalidTarget, "the mafia can only eliminate bystanders");

  st.votes[voter] = Vote{voter, target, now, st.phase.index, st.phase.kind};
  return st;
}

std::map<PlayerId, int> current_counts(const GameState& st) {
  std::map<PlayerId, int> counts;
  for (const auto& [voter, vote] : st.votes) {
    const Player* v = st.find(voter);
    const Player* t = st.find(vote.target);
    if (v && t && v->alive && t->alive) ++counts[vote.target];
  }
  return counts;
}

TallyResult tally_and_eliminate(GameState st, TimePoint now) {
  if (st.outcome != Outcome::Ongoing) throw Error(Errc::GameFinished, "game is over");
  if (st.tallied) throw Error(Errc::NotPermitted, "phase already tallied");
  if (now < st.phase.deadline()) throw Error(Errc::PhaseStillOpen, "phase clock has not expired");

  TallyResult out;
  out.counts = current_counts(st);

  int best = 0;
  for (const auto& [_, c] : out.counts) best = std::max(best, c);
  if (best > 0) {
    // Candidates in join order so the seeded draw is reproducible.
    std::vector<PlayerId> tied;
    for (const auto& p : st.players) {
      auto it = out.counts.find(p.id);
      if (it != out.counts.end() && it->second == best) tied.push_back(p.id);
    }
    std::size_t pick = 0;
    if (tied.size() > 1) {
      const std::uint64_t salt = static_cast<std::uint64_t>(st.phase.index) * 2 +
                                 (st.phase.kind == PhaseKind::Nighttime ? 1 : 0);
      SeededRng rng(derive_seed(st.rules.rng_seed, 0x7469650000000000ULL | salt));
      pick = static_cast<std::size_t>(rng.below(tied.size()));
    }
    out.eliminated = tied[pick];
    st.find(*out.eliminated)->alive = false;
    if (st.phase.kind == PhaseKind::Nighttime) st.pending_victim = out.eliminated;
  }

  st.history.push_back(PhaseRecord{st.phase.index, st.phase.kind, out.eliminated});
  st.tallied = true;
  st.outcome = check_outcome(st);
  out.state = std::move(st);
  return out;
}

Outcome check_outcome(const GameState& st) {
  if (st.outcome == Outcome::Aborted) return Outcome::Aborted;
  const int mafia = st.living(Role::Mafia);
  const int bystanders = st.living(Role::Bystander);
  if (mafia == 0) return Outcome::BystanderWin;
  if (mafia >= bystanders) return Outcome::MafiaWin;
  return Outcome::Ongoing;
}

PhaseTransition advance_phase(GameState st, TimePoint now) {
  st.outcome = check_outcome(st);
  if (st.outcome != Outcome::Ongoing) throw Error(Errc::GameFinished, "game is over");
  if (!st.tallied) throw Error(Errc::PhaseStillOpen, "current phase has not been tallied");

  PhaseTransition tr;
  tr.from = st.phase;
  if (st.phase.kind == PhaseKind::Daytime) {
    st.phase = Phase{st.phase.index, PhaseKind::Nighttime, now, st.rules.night_duration};
  } else {
    st.phase = Phase{st.phase.index + 1, PhaseKind::Daytime, now, st.rules.day_duration};
    tr.revealed_victim = std::exchange(st.pending_victim, std::nullopt);
    if (st.phase.index > st.rules.max_rounds) st.outcome = Outcome::Aborted;
  }
  st.votes.clear();
  st.tallied = false;
  st.outcome = check_outcome(st);
  tr.to = st.phase;
  tr.state = std::move(st);
  return tr;
}

}  // namespace amafia
