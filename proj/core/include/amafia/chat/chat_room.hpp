// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amafia/clock.hpp"
#include "amafia/game/game_core.hpp"
#include "amafia/ids.hpp"

namespace amafia {

using Seq = std::int64_t;

enum class Scope : std::uint8_t { DaytimePublic, NighttimeMafia, System };

std::string_view to_string(Scope s) noexcept;
Scope parse_scope(std::string_view s);

/// Author id used for all game-management announcements.
inline const PlayerId kGameManager{"@game-manager"};
inline constexpr std::string_view kGameManagerName = "Game-Manager";

struct ChatMessage {
  Seq seq = 0;
  TimePoint timestamp{};
  PlayerId author;
  std::string author_name;
  std::string content;
  Scope scope = Scope::System;
  int phase_index = 0;

  bool from_game_manager() const { return author == kGameManager; }
  bool operator==(const ChatMessage&) const = default;
};

/// Scope a message occupies given the phase it was sent in.
Scope scope_for(PhaseKind kind) noexcept;
/// Scope rule: DaytimePublic and System reach everyone, NighttimeMafia only mafia.
bool visible_to(Scope scope, Role viewer_role) noexcept;

/// Immutable view of the log as one player could see it at a point in time.
struct ContextSnapshot {
  PlayerId viewer;
  Seq snapshot_seq = 0;  // log position the snapshot was cut at
  std::vector<ChatMessage> messages;
  TimePoint taken_at{};
  TimePoint room_opened_at{};
};

/// Append-only, totally ordered chat log of one game. Visibility is decided
/// from the GameState passed in, so the room never duplicates roster state.
class ChatRoom {
 public:
  explicit ChatRoom(TimePoint opened_at) : opened_at_(opened_at) {}

  /// Player message. Scope follows the current phase. Throws NotPermitted,
  /// EmptyMessage or UnknownPlayer.
  const ChatMessage& append(const GameState& game, const PlayerId& author, std::string_view content,
                            TimePoint now);

  /// Game-manager announcement; System scope unless the caller narrows it to
  /// the mafia channel.
  const ChatMessage& announce(const GameState& game, std::string_view content, TimePoint now,
                              Scope scope = Scope::System);

  ContextSnapshot visible_history(const GameState& game, const PlayerId& viewer,
                                  std::optional<Seq> up_to = std::nullopt,
                                  std::optional<TimePoint> taken_at = std::nullopt) const;

  const std::vector<ChatMessage>& messages() const { return log_; }
  Seq last_seq() const { return log_.empty() ? 0 : log_.back().seq; }
  TimePoint opened_at() const { return opened_at_; }

 private:
  const ChatMessage& push(ChatMessage msg);

  TimePoint opened_at_;
  std::vector<ChatMessage> log_;
};

/// Chat content is single-line: CR/LF become spaces and ends are trimmed.
std::string normalize_content(std::string_view content);

}  // namespace amafia
