// SPDX-License-Identifier: Apache-2.0
#include "amafia/agent/agent_runtime.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include <spdlog/spdlog.h>

#include "amafia/error.hpp"

namespace amafia {

std::string_view to_string(Decision d) noexcept { return d == Decision::Send ? "send" : "wait"; }

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ParsedDecision parse_scheduler_output(std::string_view raw) {
  const std::string text = lower(raw);
  const bool send = text.find("<send>") != std::string::npos;
  const bool wait = text.find("<wait>") != std::string::npos;
  if (send != wait) return {send ? Decision::Send : Decision::Wait, false};
  return {Decision::Wait, true};
}

RateInfo compute_rate_and_variant(const ContextSnapshot& snapshot, const PlayerId& agent, int n_active,
                                  Scope scope) {
  RateInfo info;
  for (const auto& m : snapshot.messages) {
    if (m.from_game_manager() || m.scope != scope) continue;
    if (m.author == agent)
      ++info.agent_msgs;
    else
      ++info.others_msgs;
  }
  const int total = info.agent_msgs + info.others_msgs;
  info.rate = total == 0 ? 0.0 : static_cast<double>(info.agent_msgs) / total;
  const long long n = std::max(n_active, 1);
  info.variant = static_cast<long long>(info.agent_msgs) * n < total ? PromptVariant::SchedulerTalkative
                                                                     : PromptVariant::SchedulerListener;
  return info;
}

int count_words(std::string_view text) {
  int words = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

Duration typing_delay(std::string_view text, double words_per_second) {
  if (!(words_per_second > 0.0)) throw Error(Errc::InvalidConfig, "words_per_second must be > 0");
  return Duration{std::llround(count_words(text) * 1000.0 / words_per_second)};
}

std::string sanitize_generated(std::string_view raw, std::string_view agent_name) {
  std::string_view line;
  std::string_view rest = raw;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    std::string_view candidate = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!candidate.empty()) {
      line = candidate;
      break;
    }
  }

  static const std::regex stamp(R"(^\[\s*\d{1,2}:\d{2}(:\d{2})?\s*\]\s*)");
  const std::string name_prefix = lower(agent_name) + ":";
  std::string text(line);
  for (bool changed = true; changed;) {
    changed = false;
    std::smatch m;
    if (std::regex_search(text, m, stamp)) {
      text.erase(0, m.length(0));
      changed = true;
    }
    if (!agent_name.empty() && lower(std::string_view(text).substr(0, name_prefix.size())) == name_prefix) {
      text.erase(0, name_prefix.size());
      changed = true;
    }
    text = std::string(trim(text));
  }
  return text;
}

VoteChoice match_vote_reply(std::string_view reply, std::span<const std::string> candidates, SeededRng& rng) {
  if (candidates.empty()) throw Error(Errc::NoCandidates, "no candidates to vote for");
  const std::string text = lower(reply);
  std::optional<std::size_t> best;
  std::size_t best_pos = std::string::npos;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::string name = lower(candidates[i]);
    if (name.empty()) continue;
    auto pos = text.find(name);
    if (pos == std::string::npos) continue;
    if (!best || pos < best_pos || (pos == best_pos && name.size() > candidates[*best].size())) {
      best = i;
      best_pos = pos;
    }
  }
  if (best) return {candidates[*best], false};
  return {candidates[static_cast<std::size_t>(rng.below(candidates.size()))], true};
}

void AgentConfig::validate() const {
  if (!(words_per_second > 0.0)) throw Error(Errc::InvalidConfig, "words_per_second must be > 0");
  if (!(vote_trigger_fraction > 0.0 && vote_trigger_fraction <= 1.0))
    throw Error(Errc::InvalidConfig, "vote_trigger_fraction must be in (0, 1]");
  if (min_iteration_gap < Duration::zero() || idle_poll <= Duration::zero())
    throw Error(Errc::InvalidConfig, "agent gaps must be non-negative");
  scheduler_params.validate();
  generator_params.validate();
  voter_params.validate();
}

AgentRuntime::AgentRuntime(AgentProfile profile, AgentConfig config, LlmGateway& llm, Clock& clock,
                           PromptForge forge, std::uint64_t seed)
    : profile_(std::move(profile)),
      config_(std::move(config)),
      llm_(llm),
      clock_(clock),
      forge_(forge),
      rng_(derive_seed(seed, 0x6167656e74ULL)) {
  config_.validate();
  if (profile_.personality_text.empty()) profile_.personality_text = config_.personality;
  profile_.words_per_second = config_.words_per_second;
}

namespace {

CompletionRequest make_request(const std::string& model, const PromptBundle& prompt, const DecodingParams& p) {
  return CompletionRequest{model, {{"system", prompt.system_text}, {"user", prompt.user_text}}, p};
}

}  // namespace

AgentDecisionRecord AgentRuntime::run_iteration(AgentHost& host, std::stop_token stop) {
  AgentDecisionRecord rec;
  rec.agent = profile_.player_id;
  rec.iteration = ++iteration_;
  rec.started_at = clock_.now();

  const AgentView view = host.agent_view(profile_.player_id);
  const ContextSnapshot snap = host.snapshot(profile_.player_id);
  rec.phase_index = view.phase.index;
  rec.phase_kind = view.phase.kind;
  rec.snapshot_seq = snap.snapshot_seq;
  rec.n_active = view.n_active;

  const RateInfo rate = compute_rate_and_variant(snap, profile_.player_id, view.n_active, scope_for(view.phase.kind));
  rec.agent_msgs = rate.agent_msgs;
  rec.others_msgs = rate.others_msgs;
  rec.rate = rate.rate;
  rec.variant_used = rate.variant;
  rec.scheduler_prompt = forge_.build_scheduler_prompt(snap, profile_, rate.variant);

  try {
    auto resp = llm_.complete(make_request(config_.scheduler_model, rec.scheduler_prompt, config_.scheduler_params));
    rec.raw_scheduler_output = resp.text;
    rec.latencies.scheduler = resp.latency;
    rec.scheduler_request_hash = resp.request_hash;
  } catch (const Error& e) {
    if (e.code() != Errc::LLMUnavailable) throw;
    rec.llm_unavailable = true;
    rec.decision = Decision::Wait;
    return rec;
  }

  const ParsedDecision parsed = parse_scheduler_output(rec.raw_scheduler_output);
  rec.malformed = parsed.malformed;
  rec.decision = parsed.decision;
  if (parsed.decision == Decision::Wait) return rec;

  // Same snapshot as the scheduler: nothing posted since can leak in.
  rec.generator_prompt = forge_.build_generator_prompt(snap, profile_);
  try {
    auto resp = llm_.complete(make_request(config_.generator_model, *rec.generator_prompt, config_.generator_params));
    rec.raw_generator_output = resp.text;
    rec.latencies.generator = resp.latency;
    rec.generator_request_hash = resp.request_hash;
  } catch (const Error& e) {
    if (e.code() != Errc::LLMUnavailable) throw;
    rec.llm_unavailable = true;
    rec.decision = Decision::Wait;
    return rec;
  }

  rec.generated_text = sanitize_generated(*rec.raw_generator_output, profile_.character_name);
  rec.generation_completed_at = clock_.now();
  if (rec.generated_text->empty()) return rec;

  rec.typing_delay = typing_delay(*rec.generated_text, config_.words_per_second);
  if (!clock_.sleep_for(rec.typing_delay, stop)) {
    rec.dropped = true;
    return rec;
  }
  rec.published_seq = host.publish(profile_.player_id, *rec.generated_text, view.phase);
  if (rec.published_seq)
    rec.published_at = clock_.now();
  else
    rec.dropped = true;
  return rec;
}

AgentVoteRecord AgentRuntime::cast_agent_vote(const ContextSnapshot& snapshot,
                                              std::span<const std::string> candidates, PhaseKind phase) {
  AgentVoteRecord rec;
  rec.agent = profile_.player_id;
  rec.phase_kind = phase;
  rec.at = clock_.now();
  for (const auto& c : candidates)
    if (c != profile_.character_name) rec.candidates.push_back(c);
  rec.prompt = forge_.build_voter_prompt(snapshot, profile_, rec.candidates, phase);
  try {
    auto resp = llm_.complete(make_request(config_.voter_model, rec.prompt, config_.voter_params));
    rec.raw_reply = resp.text;
  } catch (const Error& e) {
    if (e.code() != Errc::LLMUnavailable) throw;
    rec.llm_unavailable = true;
  }
  VoteChoice choice = match_vote_reply(rec.raw_reply, rec.candidates, rng_);
  rec.target = choice.target;
  rec.fallback = choice.fallback;
  return rec;
}

void AgentRuntime::maybe_vote(AgentHost& host, const AgentView& view) {
  if (!view.can_vote || view.has_voted || view.tallied) return;
  const auto key = std::pair{view.phase.index, view.phase.kind};
  if (voted_phases_.contains(key)) return;
  const auto trigger = view.phase.start + std::chrono::duration_cast<Duration>(
                                              view.phase.duration * config_.vote_trigger_fraction);
  const TimePoint now = clock_.now();
  if (now < trigger || now >= view.phase.deadline()) return;
  voted_phases_.insert(key);
  if (view.vote_candidates.empty()) return;

  AgentVoteRecord rec = cast_agent_vote(host.snapshot(profile_.player_id), view.vote_candidates, view.phase.kind);
  rec.phase_index = view.phase.index;
  rec.accepted = host.vote(profile_.player_id, rec.target);
  host.record_vote(rec);
}

void AgentRuntime::run(AgentHost& host, std::stop_token stop) {
  while (!stop.stop_requested()) {
    const AgentView view = host.agent_view(profile_.player_id);
    if (view.outcome != Outcome::Ongoing || !view.alive) break;

    maybe_vote(host, view);

    const TimePoint now = clock_.now();
    const bool chat_open = view.admitted && !view.tallied && now < view.phase.deadline() &&
                           (view.phase.kind == PhaseKind::Daytime || config_.participate_at_night);
    if (!chat_open) {
      // Wake at the vote trigger if one is still due, otherwise at phase end.
      TimePoint wake = std::max(view.phase.deadline(), now + config_.idle_poll);
      if (view.can_vote && !view.has_voted && !voted_phases_.contains({view.phase.index, view.phase.kind})) {
        auto trigger = view.phase.start + std::chrono::duration_cast<Duration>(view.phase.duration *
                                                                               config_.vote_trigger_fraction);
        if (trigger > now) wake = std::min(wake, trigger);
      }
      if (!clock_.sleep_until(wake, stop)) break;
      continue;
    }

    AgentDecisionRecord rec = run_iteration(host, stop);
    host.record_decision(rec);
    if (config_.min_iteration_gap > Duration::zero() && !clock_.sleep_for(config_.min_iteration_gap, stop)) break;
  }
}

}  // namespace amafia
