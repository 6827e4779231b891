// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "amafia/agent/agent_runtime.hpp"
#include "amafia/chat/chat_room.hpp"
#include "amafia/game/game_core.hpp"

// Line-delimited game archive. Every line is one JSON object
//   {"type": ..., "seq": n, "ts": epoch-ms, "data": {...}}
// starting with exactly one "header" (seq 0) and containing exactly one
// "outcome". See docs/log-format.md for the field-by-field contract.
namespace amafia {

inline constexpr std::string_view kLogSchemaVersion = "1.0.0";

struct RosterEntry {
  PlayerId id;
  std::string character_name;
  Role role = Role::Bystander;
  bool is_agent = false;
};

struct LogHeader {
  std::string schema_version{kLogSchemaVersion};
  std::string game_id;
  std::string source = "live";  // live | simulated | import:<adapter>
  TimePoint started_at{};
  Rules rules;
  std::vector<RosterEntry> roster;  // join order, which seeds role assignment
  nlohmann::json config = nlohmann::json::object();
};

struct SurveyResponse {
  PlayerId respondent;
  std::optional<std::string> guessed_agent;
  std::optional<TimePoint> guessed_at;
  std::optional<int> human_similarity;
  std::optional<int> timing;
  std::optional<int> relevance;
  std::optional<TimePoint> scored_at;
  bool identified_agent = false;
  bool partial = true;  // any of the three scores missing
};

struct MessageEvent {
  ChatMessage message;
};

struct VoteEvent {
  Vote vote;
};

struct PhaseEvent {
  enum class Edge : std::uint8_t { Start, End };
  Edge edge = Edge::Start;
  int phase_index = 0;
  PhaseKind kind = PhaseKind::Daytime;
  Duration duration{0};
  std::optional<PlayerId> revealed_victim;  // Start of a Daytime after a night kill
};

struct EliminationEvent {
  PlayerId player;
  int phase_index = 0;
  PhaseKind kind = PhaseKind::Daytime;
  bool announced = true;  // night kills are announced at the next daybreak
};

struct AgentDecisionEvent {
  PlayerId agent;
  AgentDecisionRecord record;
};

struct AgentVoteEvent {
  PlayerId agent;
  AgentVoteRecord record;
};

struct RevealEvent {
  std::vector<std::string> agent_names;
};

struct SurveyEvent {
  SurveyResponse response;
};

struct OutcomeEvent {
  Outcome outcome = Outcome::Ongoing;
  int rounds = 0;
};

/// Record of a type this build does not know; kept verbatim.
struct UnknownEvent {
  std::string type;
  nlohmann::json data;
};

using EventPayload = std::variant<MessageEvent, VoteEvent, PhaseEvent, EliminationEvent, AgentDecisionEvent,
                                  AgentVoteEvent, RevealEvent, SurveyEvent, OutcomeEvent, UnknownEvent>;

std::string_view event_type(const EventPayload& payload);

struct LogRecord {
  std::int64_t seq = 0;
  TimePoint ts{};
  EventPayload payload;
  nlohmann::json extra_fields = nlohmann::json::object();  // unknown top-level keys
  nlohmann::json extra_data = nlohmann::json::object();    // unknown keys inside "data"

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&payload);
  }
};

struct GameLog {
  LogHeader header;
  nlohmann::json header_extra_fields = nlohmann::json::object();
  nlohmann::json header_extra_data = nlohmann::json::object();
  std::vector<LogRecord> events;
  std::vector<std::string> warnings;

  std::optional<Outcome> outcome() const;
  const RosterEntry* roster_entry(const PlayerId& id) const;
  const RosterEntry* agent() const;  // first agent seat, if any
};

/// JSON line (without trailing newline) for a record / header.
std::string encode_header_line(const GameLog& log);
std::string encode_record_line(const LogRecord& record);

/// Serializes a whole log, one record per line.
std::string encode_log(const GameLog& log);

/// `<YYYYMMDDTHHMMSSZ>_<game-id>.log`
std::string log_file_name(TimePoint started_at, std::string_view game_id);

struct ReadOptions {
  bool require_outcome = true;
};

/// Parses and validates a log. A torn (unparseable) final
/// line is dropped with a warning; any other defect throws SchemaError with
/// the 1-based line number.
GameLog parse_log(std::string_view text, const ReadOptions& options = {});
GameLog read_log(const std::filesystem::path& path, const ReadOptions& options = {});

/// Every `*.log` file under `dir`, sorted by name.
std::vector<std::filesystem::path> list_logs(const std::filesystem::path& dir);

/// Appends records to a log file (or only to memory when no path is given),
/// flushing each line. seq numbers and timestamp monotonicity are enforced
/// here so callers cannot produce an out-of-order archive.
class ArchiveWriter {
 public:
  ArchiveWriter() = default;  // memory only
  explicit ArchiveWriter(std::filesystem::path path);

  void write_header(const LogHeader& header);
  /// Throws Error(HeaderMissing) before write_header.
  const LogRecord& write_event(TimePoint ts, EventPayload payload);
  const LogRecord& write_outcome(TimePoint ts, OutcomeEvent outcome);

  bool has_header() const { return header_written_; }
  bool has_outcome() const { return outcome_written_; }
  const GameLog& log() const { return log_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void emit(const std::string& line);

  std::optional<std::filesystem::path> path_;
  std::unique_ptr<std::ofstream> out_;
  GameLog log_;
  bool header_written_ = false;
  bool outcome_written_ = false;
  std::int64_t next_seq_ = 1;
  TimePoint last_ts_{};
};

/// Result of pushing a log's vote/phase stream back through the rules engine.
struct ReplayResult {
  bool roles_match = false;
  bool eliminations_match = false;
  bool outcome_match = false;
  Outcome replayed_outcome = Outcome::Ongoing;
  std::vector<std::string> mismatches;

  bool ok() const { return roles_match && eliminations_match && outcome_match; }
};

ReplayResult replay_log(const GameLog& log);

/// Lowers/raises a log from another layout. Adapters: "native" (this
/// format), "textdump" (directory-per-game text dumps; see docs/log-format.md).
/// Throws UnrecognizedLayout for an unknown adapter or unreadable game.
std::vector<GameLog> import_external(const std::filesystem::path& path, std::string_view adapter);

}  // namespace amafia
