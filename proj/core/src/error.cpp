// SPDX-License-Identifier: Apache-2.0
#include "amafia/error.hpp"

namespace amafia {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::TooFewPlayers: return "TooFewPlayers";
    case Errc::TooManyPlayers: return "TooManyPlayers";
    case Errc::PhaseStillOpen: return "PhaseStillOpen";
    case Errc::GameFinished: return "GameFinished";
    case Errc::NotPermitted: return "NotPermitted";
    case Errc::InvalidTarget: return "InvalidTarget";
    case Errc::EmptyMessage: return "EmptyMessage";
    case Errc::UnknownPlayer: return "UnknownPlayer";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::LobbyFull: return "LobbyFull";
    case Errc::LobbyClosed: return "LobbyClosed";
    case Errc::NoConsent: return "NoConsent";
    case Errc::UnknownGame: return "UnknownGame";
    case Errc::GameOngoing: return "GameOngoing";
    case Errc::SurveyClosed: return "SurveyClosed";
    case Errc::DuplicateSubmission: return "DuplicateSubmission";
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::IOFailure: return "IOFailure";
    case Errc::HeaderMissing: return "HeaderMissing";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::UnrecognizedLayout: return "UnrecognizedLayout";
    case Errc::NoDaytimePhases: return "NoDaytimePhases";
    case Errc::DegenerateClass: return "DegenerateClass";
    case Errc::LLMUnavailable: return "LLMUnavailable";
    case Errc::EmbeddingUnavailable: return "EmbeddingUnavailable";
    case Errc::UnknownPlaceholder: return "UnknownPlaceholder";
  }
  return "Unknown";
}

}  // namespace amafia
