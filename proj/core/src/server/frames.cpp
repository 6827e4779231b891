// SPDX-License-Identifier: Apache-2.0
#include "amafia/server/frames.hpp"

namespace amafia {

namespace {

std::optional<int> score(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw Error(Errc::InvalidFrame, std::string(key) + " must be an integer");
  const int v = it->get<int>();
  if (v < 1 || v > 5) throw Error(Errc::InvalidFrame, std::string(key) + " must be between 1 and 5");
  return v;
}

std::string text_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(Errc::InvalidFrame, std::string("missing string '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

ClientFrame parse_client_frame(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidFrame, "frame must be a JSON object");
  const std::string type = text_field(j, "type");
  if (type == "send_message") return SendMessageFrame{text_field(j, "content")};
  if (type == "cast_vote") return CastVoteFrame{text_field(j, "target")};
  if (type == "survey_submit") {
    const std::string stage = text_field(j, "stage");
    if (stage == "guess") return SurveyGuessFrame{text_field(j, "guess")};
    if (stage == "scores")
      return SurveyScoresFrame{score(j, "human_similarity"), score(j, "timing"), score(j, "relevance")};
    throw Error(Errc::InvalidFrame, "unknown survey stage '" + stage + "'");
  }
  throw Error(Errc::InvalidFrame, "unknown frame type '" + type + "'");
}

ClientFrame parse_client_frame(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidFrame, std::string("invalid JSON: ") + e.what());
  }
  return parse_client_frame(j);
}

nlohmann::json message_frame(const ChatMessage& m) {
  return {{"type", "message"},
          {"seq", m.seq},
          {"ts", to_millis(m.timestamp)},
          {"author", m.author_name},
          {"content", m.content},
          {"scope", to_string(m.scope)},
          {"phase_index", m.phase_index}};
}

nlohmann::json error_frame(Errc code, std::string_view detail) {
  return {{"type", "error"}, {"code", to_string(code)}, {"message", detail}};
}

}  // namespace amafia
