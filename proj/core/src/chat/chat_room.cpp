// SPDX-License-Identifier: Apache-2.0
#include "amafia/chat/chat_room.hpp"

#include <algorithm>

#include "amafia/error.hpp"

namespace amafia {

std::string_view to_string(Scope s) noexcept {
  switch (s) {
    case Scope::DaytimePublic: return "DaytimePublic";
    case Scope::NighttimeMafia: return "NighttimeMafia";
    case Scope::System: return "System";
  }
  return "?";
}

Scope parse_scope(std::string_view s) {
  for (Scope sc : {Scope::DaytimePublic, Scope::NighttimeMafia, Scope::System})
    if (to_string(sc) == s) return sc;
  throw Error(Errc::SchemaViolation, "unknown scope '" + std::string(s) + "'");
}

Scope scope_for(PhaseKind kind) noexcept {
  return kind == PhaseKind::Daytime ? Scope::DaytimePublic : Scope::NighttimeMafia;
}

bool visible_to(Scope scope, Role viewer_role) noexcept {
  return scope != Scope::NighttimeMafia || viewer_role == Role::Mafia;
}

std::string normalize_content(std::string_view content) {
  std::string out(content);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  auto first = std::find_if(out.begin(), out.end(), not_space);
  auto last = std::find_if(out.rbegin(), out.rend(), not_space).base();
  return first < last ? std::string(first, last) : std::string{};
}

const ChatMessage& ChatRoom::push(ChatMessage msg) {
  msg.seq = last_seq() + 1;
  if (!log_.empty()) msg.timestamp = std::max(msg.timestamp, log_.back().timestamp);
  log_.push_back(std::move(msg));
  return log_.back();
}

const ChatMessage& ChatRoom::append(const GameState& game, const PlayerId& author,
                                    std::string_view content, TimePoint now) {
  const Player* p = game.find(author);
  if (!p) throw Error(Errc::UnknownPlayer, "unknown author");
  if (game.outcome != Outcome::Ongoing) throw Error(Errc::NotPermitted, "game is over");
  if (!p->alive) throw Error(Errc::NotPermitted, "eliminated players cannot send messages");
  if (game.phase.kind == PhaseKind::Nighttime && p->role != Role::Mafia)
    throw Error(Errc::NotPermitted, "only mafia players talk at night");
  std::string text = normalize_content(content);
  if (text.empty()) throw Error(Errc::EmptyMessage, "message is empty");

  return push(ChatMessage{0, now, author, p->character_name, std::move(text),
                          scope_for(game.phase.kind), game.phase.index});
}

const ChatMessage& ChatRoom::announce(const GameState& game, std::string_view content, TimePoint now,
                                      Scope scope) {
  std::string text = normalize_content(content);
  if (text.empty()) throw Error(Errc::EmptyMessage, "announcement is empty");
  if (scope == Scope::DaytimePublic) scope = Scope::System;
  return push(ChatMessage{0, now, kGameManager, std::string(kGameManagerName), std::move(text), scope,
                          game.phase.index});
}

ContextSnapshot ChatRoom::visible_history(const GameState& game, const PlayerId& viewer,
                                          std::optional<Seq> up_to,
                                          std::optional<TimePoint> taken_at) const {
  const Player* p = game.find(viewer);
  if (!p) throw Error(Errc::UnknownPlayer, "unknown viewer");
  ContextSnapshot snap;
  snap.viewer = viewer;
  snap.snapshot_seq = std::min(up_to.value_or(last_seq()), last_seq());
  snap.room_opened_at = opened_at_;
  for (const auto& m : log_) {
    if (m.seq > snap.snapshot_seq) break;
    if (visible_to(m.scope, p->role)) snap.messages.push_back(m);
  }
  snap.taken_at = taken_at.value_or(log_.empty() ? opened_at_ : log_.back().timestamp);
  return snap;
}

}  // namespace amafia
