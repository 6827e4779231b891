// SPDX-License-Identifier: Apache-2.0
#include "amafia/prompt/prompt_forge.hpp"

#include <algorithm>

#include "amafia/error.hpp"
#include "amafia/prompt/templates.hpp"

namespace amafia {

std::string_view to_string(PromptVariant v) noexcept {
  switch (v) {
    case PromptVariant::SchedulerTalkative: return "SchedulerTalkative";
    case PromptVariant::SchedulerListener: return "SchedulerListener";
    case PromptVariant::Generator: return "Generator";
    case PromptVariant::Voter: return "Voter";
  }
  return "?";
}

PromptVariant parse_prompt_variant(std::string_view s) {
  for (auto v : {PromptVariant::SchedulerTalkative, PromptVariant::SchedulerListener,
                 PromptVariant::Generator, PromptVariant::Voter})
    if (to_string(v) == s) return v;
  throw Error(Errc::SchemaViolation, "unknown prompt variant '" + std::string(s) + "'");
}

std::string_view default_personality() { return templates::get("personality_default"); }

std::string describe_duration(Duration d) {
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(d).count();
  if (secs > 0 && secs % 60 == 0) {
    auto mins = secs / 60;
    return std::to_string(mins) + (mins == 1 ? " minute" : " minutes");
  }
  return std::to_string(secs) + (secs == 1 ? " second" : " seconds");
}

std::string phase_announcement(PhaseKind kind, Duration duration) {
  const std::string d = describe_duration(duration);
  return templates::render(
      templates::get(kind == PhaseKind::Daytime ? "announce_daytime" : "announce_nighttime"),
      {{"duration", d}});
}

std::string PromptForge::render_history(const ContextSnapshot& snapshot) const {
  std::string out;
  for (const auto& m : snapshot.messages) {
    out += timestamp(m.timestamp);
    out += ' ';
    out += m.author_name;
    out += ": ";
    out += m.content;
    out += "\n\n";
  }
  return out;
}

std::string PromptForge::preamble(const ContextSnapshot& snapshot, const AgentProfile& agent) const {
  const std::string opened = timestamp(snapshot.room_opened_at);
  std::string_view personality =
      agent.personality_text.empty() ? default_personality() : std::string_view(agent.personality_text);
  return templates::render(templates::get("preamble"), {{"name", agent.character_name},
                                                        {"personality", personality},
                                                        {"role", to_string(agent.role)},
                                                        {"room_opened", opened}});
}

PromptBundle PromptForge::build_scheduler_prompt(const ContextSnapshot& snapshot, const AgentProfile& agent,
                                                 PromptVariant variant) const {
  if (variant != PromptVariant::SchedulerTalkative && variant != PromptVariant::SchedulerListener)
    throw Error(Errc::InvalidConfig, "scheduler prompt needs a scheduler variant");
  const std::string pre = preamble(snapshot, agent);
  const std::string history = render_history(snapshot);
  const std::string now = timestamp(snapshot.taken_at);
  std::string_view instruction = templates::get(
      variant == PromptVariant::SchedulerTalkative ? "scheduler_talkative" : "scheduler_listener");

  PromptBundle b;
  b.variant = variant;
  b.snapshot_seq = snapshot.snapshot_seq;
  b.rendered_at = snapshot.taken_at;
  b.system_text = templates::render(templates::get("scheduler_system"), {{"preamble", pre}});
  b.user_text = templates::render(templates::get("scheduler_user"),
                                  {{"history", history}, {"now", now}, {"instruction", instruction}});
  return b;
}

PromptBundle PromptForge::build_generator_prompt(const ContextSnapshot& snapshot,
                                                 const AgentProfile& agent) const {
  const std::string pre = preamble(snapshot, agent);
  const std::string history = render_history(snapshot);
  const std::string now = timestamp(snapshot.taken_at);

  PromptBundle b;
  b.variant = PromptVariant::Generator;
  b.snapshot_seq = snapshot.snapshot_seq;
  b.rendered_at = snapshot.taken_at;
  b.system_text = templates::render(templates::get("generator_system"), {{"preamble", pre}});
  b.user_text = templates::render(templates::get("generator_user"), {{"history", history}, {"now", now}});
  return b;
}

PromptBundle PromptForge::build_voter_prompt(const ContextSnapshot& snapshot, const AgentProfile& agent,
                                             std::span<const std::string> living_candidates,
                                             PhaseKind phase) const {
  std::string names;
  for (const auto& c : living_candidates) {
    if (c == agent.character_name) continue;
    if (!names.empty()) names += ", ";
    names += c;
  }
  if (names.empty()) throw Error(Errc::NoCandidates, "no one to vote for");

  const std::string pre = preamble(snapshot, agent);
  const std::string history = render_history(snapshot);
  const std::string now = timestamp(snapshot.taken_at);
  std::string_view question =
      templates::get(phase == PhaseKind::Daytime ? "voter_daytime" : "voter_nighttime");

  PromptBundle b;
  b.variant = PromptVariant::Voter;
  b.snapshot_seq = snapshot.snapshot_seq;
  b.rendered_at = snapshot.taken_at;
  b.system_text = templates::render(templates::get("voter_system"), {{"preamble", pre}});
  b.user_text = templates::render(
      templates::get("voter_user"),
      {{"history", history}, {"now", now}, {"question", question}, {"candidates", names}});
  return b;
}

}  // namespace amafia
