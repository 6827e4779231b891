// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "amafia/agent/profile.hpp"
#include "amafia/chat/chat_room.hpp"
#include "amafia/clock.hpp"
#include "amafia/llm/gateway.hpp"
#include "amafia/prompt/prompt_forge.hpp"
#include "amafia/rng.hpp"

namespace amafia {

enum class Decision : std::uint8_t { Wait, Send };
std::string_view to_string(Decision d) noexcept;

struct ParsedDecision {
  Decision decision = Decision::Wait;
  bool malformed = false;
};

/// Case-insensitive scan for `<send>` / `<wait>`. Exactly one kind of token
/// present -> that decision; both or neither -> Wait, flagged malformed.
ParsedDecision parse_scheduler_output(std::string_view raw);

struct RateInfo {
  int agent_msgs = 0;
  int others_msgs = 0;
  double rate = 0.0;
  PromptVariant variant = PromptVariant::SchedulerTalkative;
};

/// Message rate of the agent among player-authored messages of `scope` in the
/// snapshot. Talkative iff rate < 1/n_active (evaluated as a*n < a+o on
/// integers, so rate == 1/n selects Listener).
RateInfo compute_rate_and_variant(const ContextSnapshot& snapshot, const PlayerId& agent, int n_active,
                                  Scope scope);

/// Whitespace-separated token count.
int count_words(std::string_view text);

/// words / words_per_second, rounded to the millisecond.
Duration typing_delay(std::string_view text, double words_per_second);

/// First non-empty line of a model reply with any leading `[HH:MM:SS]`
/// stamps and `<agent name>:` prefixes removed.
std::string sanitize_generated(std::string_view raw, std::string_view agent_name);

struct VoteChoice {
  std::string target;  // candidate name
  bool fallback = false;
};

/// Picks the candidate named in `reply` (case-insensitive; earliest mention
/// wins, longest name on a tie). No mention -> seeded uniform pick, flagged.
/// Throws NoCandidates on an empty list.
VoteChoice match_vote_reply(std::string_view reply, std::span<const std::string> candidates, SeededRng& rng);

struct CallLatencies {
  Duration scheduler{0};
  Duration generator{0};
};

/// One scheduler (and possibly generator) pass, as archived.
struct AgentDecisionRecord {
  PlayerId agent;
  std::int64_t iteration = 0;
  int phase_index = 0;
  PhaseKind phase_kind = PhaseKind::Daytime;
  Seq snapshot_seq = 0;
  int n_active = 0;
  int agent_msgs = 0;
  int others_msgs = 0;
  double rate = 0.0;
  PromptVariant variant_used = PromptVariant::SchedulerTalkative;
  std::string raw_scheduler_output;
  Decision decision = Decision::Wait;
  bool malformed = false;
  bool llm_unavailable = false;
  bool dropped = false;  // phase closed during the typing delay
  std::optional<std::string> raw_generator_output;
  std::optional<std::string> generated_text;
  Duration typing_delay{0};
  std::optional<Seq> published_seq;
  CallLatencies latencies;
  TimePoint started_at{};
  std::optional<TimePoint> generation_completed_at;
  std::optional<TimePoint> published_at;
  PromptBundle scheduler_prompt;
  std::optional<PromptBundle> generator_prompt;
  std::string scheduler_request_hash;
  std::string generator_request_hash;
};

struct AgentVoteRecord {
  PlayerId agent;
  int phase_index = 0;
  PhaseKind phase_kind = PhaseKind::Daytime;
  TimePoint at{};
  std::vector<std::string> candidates;
  PromptBundle prompt;
  std::string raw_reply;
  std::string target;
  bool fallback = false;
  bool llm_unavailable = false;
  bool accepted = false;
};

/// What the agent may know about the game at a given moment.
struct AgentView {
  Outcome outcome = Outcome::Ongoing;
  bool alive = false;
  bool admitted = false;  // may talk in the current phase
  bool can_vote = false;
  bool has_voted = false;
  bool tallied = false;
  Phase phase;
  int n_active = 0;
  std::vector<std::string> vote_candidates;  // character names, agent excluded
};

/// The agent's only window onto a game. GameSession implements it; tests use
/// lightweight fakes.
class AgentHost {
 public:
  virtual ~AgentHost() = default;
  virtual AgentView agent_view(const PlayerId& agent) const = 0;
  virtual ContextSnapshot snapshot(const PlayerId& agent) const = 0;
  /// Appends unless `phase` is no longer the current open phase; returns the
  /// assigned seq or nullopt when the message was dropped.
  virtual std::optional<Seq> publish(const PlayerId& agent, const std::string& text, const Phase& phase) = 0;
  virtual bool vote(const PlayerId& agent, const std::string& target_name) = 0;
  virtual void record_decision(const AgentDecisionRecord& record) = 0;
  virtual void record_vote(const AgentVoteRecord&) {}
};

struct AgentConfig {
  std::string personality;  // empty -> bundled default
  double words_per_second = 1.0;
  Duration min_iteration_gap{0};
  Duration idle_poll{250};
  double vote_trigger_fraction = 0.75;
  bool participate_at_night = true;
  std::string scheduler_model = "meta-llama/Llama-3.1-8B-Instruct";
  std::string generator_model = "meta-llama/Llama-3.1-8B-Instruct";
  std::string voter_model = "meta-llama/Llama-3.1-8B-Instruct";
  DecodingParams scheduler_params = scheduler_decoding();
  DecodingParams generator_params = generator_decoding();
  DecodingParams voter_params = voter_decoding();

  /// Throws InvalidConfig on non-positive typing speed or a trigger fraction
  /// outside (0, 1].
  void validate() const;
};

/// The scheduler -> generator loop. One instance drives one agent seat and is
/// never re-entered: iterations run strictly one after another.
class AgentRuntime {
 public:
  AgentRuntime(AgentProfile profile, AgentConfig config, LlmGateway& llm, Clock& clock, PromptForge forge,
               std::uint64_t seed);

  /// Snapshot -> rate/variant -> scheduler call -> (generator call -> typing
  /// delay -> publish). Both prompts are built from the same snapshot.
  AgentDecisionRecord run_iteration(AgentHost& host, std::stop_token stop = {});

  /// Voter prompt + reply matching. Never throws for LLM failures: those fall
  /// back to a seeded random candidate.
  AgentVoteRecord cast_agent_vote(const ContextSnapshot& snapshot, std::span<const std::string> candidates,
                                  PhaseKind phase);

  /// Runs until the game ends, the agent is eliminated, or `stop` fires.
  void run(AgentHost& host, std::stop_token stop = {});

  const AgentProfile& profile() const { return profile_; }
  const AgentConfig& config() const { return config_; }
  std::int64_t iterations() const { return iteration_; }

 private:
  void maybe_vote(AgentHost& host, const AgentView& view);

  AgentProfile profile_;
  AgentConfig config_;
  LlmGateway& llm_;
  Clock& clock_;
  PromptForge forge_;
  SeededRng rng_;
  std::int64_t iteration_ = 0;
  std::set<std::pair<int, PhaseKind>> voted_phases_;
};

}  // namespace amafia
