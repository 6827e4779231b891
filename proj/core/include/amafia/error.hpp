// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amafia {

enum class Errc {
  TooFewPlayers,
  TooManyPlayers,
  PhaseStillOpen,
  GameFinished,
  NotPermitted,
  InvalidTarget,
  EmptyMessage,
  UnknownPlayer,
  NoCandidates,
  InvalidConfig,
  LobbyFull,
  LobbyClosed,
  NoConsent,
  UnknownGame,
  GameOngoing,
  SurveyClosed,
  DuplicateSubmission,
  InvalidFrame,
  IOFailure,
  HeaderMissing,
  SchemaViolation,
  UnrecognizedLayout,
  NoDaytimePhases,
  DegenerateClass,
  LLMUnavailable,
  EmbeddingUnavailable,
  UnknownPlaceholder,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and the wire protocol) can branch on it without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Schema violations point at the offending line of a log file.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error(Errc::SchemaViolation, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace amafia
