// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "amafia/chat/chat_room.hpp"
#include "amafia/error.hpp"

// Wire frames. Each frame is one JSON object with a "type" field, carried as
// one WebSocket text message (or one HTTP body). docs/protocol.md lists every
// field.
namespace amafia {

inline constexpr int kProtocolVersion = 1;

// ---- client -> server ----

struct SendMessageFrame {
  std::string content;
};

struct CastVoteFrame {
  std::string target;  // character name
};

struct SurveyGuessFrame {
  std::string guess;  // character name
};

struct SurveyScoresFrame {
  std::optional<int> human_similarity;
  std::optional<int> timing;
  std::optional<int> relevance;
};

using ClientFrame = std::variant<SendMessageFrame, CastVoteFrame, SurveyGuessFrame, SurveyScoresFrame>;

/// Throws Error(InvalidFrame) on malformed JSON, unknown type or bad fields.
/// survey_submit frames carry "stage": "guess" | "scores".
ClientFrame parse_client_frame(std::string_view text);
ClientFrame parse_client_frame(const nlohmann::json& j);
inline ClientFrame parse_client_frame(const char* text) { return parse_client_frame(std::string_view(text)); }

// ---- server -> client ----

/// `message` frame; author rendered by character name.
nlohmann::json message_frame(const ChatMessage& m);
nlohmann::json error_frame(Errc code, std::string_view detail);

}  // namespace amafia
