// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "amafia/agent/profile.hpp"
#include "amafia/chat/chat_room.hpp"

namespace amafia {

enum class PromptVariant : std::uint8_t { SchedulerTalkative, SchedulerListener, Generator, Voter };

std::string_view to_string(PromptVariant v) noexcept;
PromptVariant parse_prompt_variant(std::string_view s);

/// Role-tagged prompt text. Chat-template wrapping is left to the LLM host.
struct PromptBundle {
  std::string system_text;
  std::string user_text;
  PromptVariant variant = PromptVariant::Generator;
  Seq snapshot_seq = 0;
  TimePoint rendered_at{};

  bool operator==(const PromptBundle&) const = default;
};

/// Renders the scheduler, generator and voter prompts from a ContextSnapshot.
/// Pure: the "current time" of a prompt is the snapshot's taken_at, so the
/// same snapshot always yields the same bytes.
class PromptForge {
 public:
  explicit PromptForge(std::chrono::minutes utc_offset = std::chrono::minutes{0})
      : utc_offset_(utc_offset) {}

  PromptBundle build_scheduler_prompt(const ContextSnapshot& snapshot, const AgentProfile& agent,
                                      PromptVariant variant) const;
  PromptBundle build_generator_prompt(const ContextSnapshot& snapshot, const AgentProfile& agent) const;

  /// Throws NoCandidates when no name other than the agent's own remains.
  PromptBundle build_voter_prompt(const ContextSnapshot& snapshot, const AgentProfile& agent,
                                  std::span<const std::string> living_candidates,
                                  PhaseKind phase) const;

  /// `[HH:MM:SS] Name: content` lines joined by blank lines, one per message.
  std::string render_history(const ContextSnapshot& snapshot) const;
  std::string timestamp(TimePoint t) const { return format_hms(t, utc_offset_); }

  std::chrono::minutes utc_offset() const { return utc_offset_; }

 private:
  std::string preamble(const ContextSnapshot& snapshot, const AgentProfile& agent) const;

  std::chrono::minutes utc_offset_;
};

/// Bundled personality line used when a profile leaves it empty.
std::string_view default_personality();

/// "2 minutes", "1 minute", "90 seconds".
std::string describe_duration(Duration d);

/// Phase-start announcement in the Game-Manager's voice.
std::string phase_announcement(PhaseKind kind, Duration duration);

}  // namespace amafia
