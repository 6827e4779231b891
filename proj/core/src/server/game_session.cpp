// SPDX-License-Identifier: Apache-2.0
#include "amafia/server/game_session.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "amafia/digest.hpp"
#include "amafia/error.hpp"
#include "amafia/prompt/prompt_forge.hpp"
#include "amafia/rng.hpp"

namespace amafia {

std::string_view to_string(SessionStage s) noexcept {
  switch (s) {
    case SessionStage::Lobby: return "lobby";
    case SessionStage::Running: return "running";
    case SessionStage::Finished: return "finished";
  }
  return "?";
}

namespace {

std::string outcome_announcement(Outcome o) {
  switch (o) {
    case Outcome::MafiaWin: return "Game over! The mafia wins.";
    case Outcome::BystanderWin: return "Game over! The bystanders win.";
    case Outcome::Aborted: return "Game over! The round limit was reached, so the game ends without a winner.";
    case Outcome::Ongoing: break;
  }
  return "";
}

}  // namespace

std::shared_ptr<GameSession> GameSession::create(std::string id, GameConfig config, Clock& clock,
                                                 std::shared_ptr<ChatProvider> llm, SessionOptions options) {
  config.validate();
  if (config.agent_count > 0 && !llm) throw Error(Errc::InvalidConfig, "agent seats need an LLM provider");
  std::shared_ptr<GameSession> s(
      new GameSession(std::move(id), std::move(config), clock, std::move(llm), std::move(options)));
  return s;
}

GameSession::GameSession(std::string id, GameConfig config, Clock& clock, std::shared_ptr<ChatProvider> llm,
                         SessionOptions options)
    : id_(std::move(id)), config_(std::move(config)), clock_(clock), llm_(std::move(llm)), options_(std::move(options)) {
  const auto pool = config_.name_pool.empty() ? default_name_pool() : std::span<const std::string>(config_.name_pool);
  names_.assign(pool.begin(), pool.end());
  SeededRng rng(derive_seed(config_.rng_seed, 0x6e616d6573ULL));
  rng.shuffle(std::span<std::string>(names_));

  if (llm_) gateway_ = std::make_unique<LlmGateway>(llm_, clock_);
  for (int i = 0; i < config_.agent_count; ++i) {
    Participant p;
    p.id = PlayerId("agent-" + std::to_string(i + 1));
    p.character_name = names_[participants_.size()];
    p.token = random_token();
    p.is_agent = true;
    participants_.push_back(std::move(p));
  }
}

GameSession::~GameSession() {
  stop_agents();
  std::lock_guard lock(mu_);
  for (TimerId t : timers_) clock_.cancel(t);
}

void GameSession::stop_agents() {
  for (auto& t : agent_threads_) t.request_stop();
  for (auto& t : agent_threads_)
    if (t.joinable()) t.join();
  agent_threads_.clear();
}

std::vector<AgentRuntime*> GameSession::agents() {
  std::lock_guard lock(mu_);
  std::vector<AgentRuntime*> out;
  for (auto& a : agents_) out.push_back(a.get());
  return out;
}

// ---- lobby ----

JoinResult GameSession::join(const std::string& participant_id, bool consent_acknowledged) {
  std::lock_guard lock(mu_);
  if (participant_id.empty() || participant_id.rfind("agent-", 0) == 0 || participant_id == kGameManager.value)
    throw Error(Errc::InvalidConfig, "invalid participant id");
  for (const auto& p : participants_)
    if (p.id.value == participant_id) return {p.id, p.character_name, p.token};
  if (!consent_acknowledged) throw Error(Errc::NoConsent, "the consent form must be acknowledged before joining");
  if (stage_ != SessionStage::Lobby) throw Error(Errc::LobbyClosed, "the game has already started");
  if (static_cast<int>(participants_.size()) >= config_.roster_size) throw Error(Errc::LobbyFull, "lobby is full");

  Participant p;
  p.id = PlayerId(participant_id);
  p.character_name = names_[participants_.size()];
  p.token = random_token();
  participants_.push_back(p);
  spdlog::info("game {}: {} joined as {}", id_, participant_id, p.character_name);
  if (static_cast<int>(participants_.size()) == config_.roster_size) start_game_locked(clock_.now());
  return {p.id, p.character_name, p.token};
}

std::optional<PlayerId> GameSession::participant_for_token(std::string_view token) const {
  std::lock_guard lock(mu_);
  for (const auto& p : participants_)
    if (p.token == token && !p.is_agent) return p.id;
  return std::nullopt;
}

void GameSession::start_game_locked(TimePoint now) {
  std::vector<Seat> seats;
  for (const auto& p : participants_) seats.push_back({p.id, p.character_name, p.is_agent});
  state_ = new_game(config_.rules(), seats, now);
  room_.emplace(now);
  stage_ = SessionStage::Running;

  LogHeader header;
  header.game_id = id_;
  header.source = options_.source;
  header.started_at = now;
  header.rules = state_.rules;
  for (const auto& pl : state_.players) header.roster.push_back({pl.id, pl.character_name, pl.role, pl.is_agent});
  header.config = to_json(config_);
  if (options_.log_dir)
    archive_ = std::make_unique<ArchiveWriter>(*options_.log_dir / log_file_name(now, id_));
  else
    archive_ = std::make_unique<ArchiveWriter>();
  archive_->write_header(header);

  for (const auto& [_, sub] : subscribers_)
    if (const Player* pl = state_.find(sub.who)) sub.sink(role_packet_locked(*pl));

  if (state_.outcome != Outcome::Ongoing) {
    // Too few bystanders to ever outnumber the mafia.
    finish_locked(now);
    return;
  }
  begin_phase_locked(std::nullopt, now);

  PromptForge forge(config_.prompt_utc_offset);
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    const auto& p = participants_[i];
    if (!p.is_agent) continue;
    AgentProfile profile{p.id, p.character_name, state_.find(p.id)->role, config_.agent.personality,
                         config_.agent.words_per_second};
    agents_.push_back(std::make_unique<AgentRuntime>(profile, config_.agent, *gateway_, clock_, forge,
                                                     derive_seed(config_.rng_seed, 0x6167000000ULL + i)));
  }
  if (options_.spawn_agent_threads)
    for (auto& a : agents_)
      agent_threads_.emplace_back([this, rt = a.get()](std::stop_token st) {
        try {
          rt->run(*this, st);
        } catch (const std::exception& e) {
          spdlog::error("game {}: agent {} stopped: {}", id_, rt->profile().character_name, e.what());
        }
      });
}

// ---- phase clock ----

void GameSession::schedule_locked(TimePoint when, std::function<void(GameSession&)> fn) {
  std::weak_ptr<GameSession> weak = weak_from_this();
  timers_.push_back(clock_.schedule_at(when, [weak, fn = std::move(fn)] {
    if (auto self = weak.lock()) fn(*self);
  }));
}

void GameSession::begin_phase_locked(const std::optional<PlayerId>& revealed_victim, TimePoint now) {
  const Phase& ph = state_.phase;
  archive_->write_event(now, PhaseEvent{PhaseEvent::Edge::Start, ph.index, ph.kind, ph.duration, revealed_victim});
  if (revealed_victim)
    announce_locked(player_locked(*revealed_victim).character_name + " was killed by the mafia last night.", now);
  else if (ph.kind == PhaseKind::Daytime && ph.index > 1)
    announce_locked("Nobody was killed last night.", now);
  announce_locked(phase_announcement(ph.kind, ph.duration), now);
  broadcast_locked(phase_frame_locked("start"), [](const Player&) { return true; });
  schedule_locked(ph.deadline(), [index = ph.index, kind = ph.kind](GameSession& s) { s.on_phase_expired(index, kind); });
}

void GameSession::on_phase_expired(int phase_index, PhaseKind kind) {
  std::lock_guard lock(mu_);
  if (stage_ != SessionStage::Running || state_.tallied || state_.phase.index != phase_index ||
      state_.phase.kind != kind)
    return;
  const TimePoint now = clock_.now();
  const Phase ended = state_.phase;
  auto tally = tally_and_eliminate(state_, now);
  state_ = std::move(tally.state);
  archive_->write_event(now, PhaseEvent{PhaseEvent::Edge::End, ended.index, ended.kind, ended.duration, {}});

  nlohmann::json end_frame = phase_frame_locked("end");
  if (tally.eliminated) {
    const bool day = ended.kind == PhaseKind::Daytime;
    archive_->write_event(now, EliminationEvent{*tally.eliminated, ended.index, ended.kind, day});
    const std::string name = player_locked(*tally.eliminated).character_name;
    if (day) {
      announce_locked(name + " was voted out.", now);
      end_frame["eliminated"] = name;
      broadcast_locked(end_frame, [](const Player&) { return true; });
    } else {
      broadcast_locked(end_frame, [](const Player& p) { return p.role == Role::Bystander; });
      end_frame["eliminated"] = name;
      broadcast_locked(end_frame, [](const Player& p) { return p.role == Role::Mafia; });
    }
  } else {
    if (ended.kind == PhaseKind::Daytime) announce_locked("Nobody was voted out.", now);
    broadcast_locked(end_frame, [](const Player&) { return true; });
  }

  if (state_.outcome != Outcome::Ongoing) {
    if (state_.pending_victim) {
      announce_locked(player_locked(*state_.pending_victim).character_name + " was killed by the mafia last night.",
                      now);
      state_.pending_victim.reset();
    }
    finish_locked(now);
    return;
  }
  auto tr = advance_phase(state_, now);
  state_ = std::move(tr.state);
  if (state_.outcome == Outcome::Aborted) {
    finish_locked(now);
    return;
  }
  begin_phase_locked(tr.revealed_victim, now);
}

void GameSession::finish_locked(TimePoint now) {
  stage_ = SessionStage::Finished;
  finished_at_ = now;
  int rounds = 0;
  for (const auto& h : state_.history) rounds = std::max(rounds, h.phase_index);
  announce_locked(outcome_announcement(state_.outcome), now);
  archive_->write_outcome(now, OutcomeEvent{state_.outcome, rounds});

  nlohmann::json frame = {{"type", "phase_event"}, {"edge", "game_over"}, {"outcome", to_string(state_.outcome)}};
  nlohmann::json roles = nlohmann::json::array();
  for (const auto& p : state_.players) roles.push_back({{"name", p.character_name}, {"role", to_string(p.role)}});
  frame["roles"] = roles;
  broadcast_locked(frame, [](const Player&) { return true; });
  spdlog::info("game {}: finished, {}", id_, to_string(state_.outcome));

  if (human_count_locked() == 0 || config_.agent_count == 0) {
    survey_closed_ = true;
    return;
  }
  schedule_locked(now + config_.survey_window, [](GameSession& s) {
    std::lock_guard lock(s.mu_);
    if (!s.revealed_at_) s.reveal_locked(s.clock_.now());
  });
}

// ---- survey ----

void GameSession::reveal_locked(TimePoint now) {
  if (revealed_at_) return;
  revealed_at_ = now;
  auto names = agent_names_locked();
  archive_->write_event(now, RevealEvent{names});
  broadcast_locked({{"type", "reveal"}, {"agent_names", names}}, [](const Player&) { return true; });
  schedule_locked(now + config_.survey_window, [](GameSession& s) {
    std::lock_guard lock(s.mu_);
    s.close_survey_locked(s.clock_.now());
  });
}

void GameSession::write_survey_locked(SurveySlot& slot, TimePoint now) {
  if (slot.written) return;
  auto& r = slot.response;
  r.partial = !(r.human_similarity && r.timing && r.relevance && r.guessed_agent);
  archive_->write_event(now, SurveyEvent{r});
  slot.written = true;
}

void GameSession::close_survey_locked(TimePoint now) {
  if (survey_closed_) return;
  for (auto& [_, slot] : survey_) write_survey_locked(slot, now);
  survey_closed_ = true;
}

void GameSession::submit_guess(const PlayerId& who, std::string_view character_name) {
  std::lock_guard lock(mu_);
  const TimePoint now = clock_.now();
  if (stage_ != SessionStage::Finished) throw Error(Errc::GameOngoing, "the survey opens when the game ends");
  const Participant* p = participant_locked(who);
  if (!p || p->is_agent) throw Error(Errc::UnknownPlayer, "not a human participant of this game");
  if (revealed_at_ || reveal_scheduled_ || survey_closed_ || now >= finished_at_ + config_.survey_window)
    throw Error(Errc::SurveyClosed, "guessing is closed");
  if (survey_.contains(who)) throw Error(Errc::DuplicateSubmission, "guess already submitted");
  if (!state_.find_by_name(character_name)) throw Error(Errc::InvalidTarget, "no such player");

  SurveySlot slot;
  slot.response.respondent = who;
  slot.response.guessed_agent = std::string(character_name);
  slot.response.guessed_at = now;
  const auto agents = agent_names_locked();
  slot.response.identified_agent = std::find(agents.begin(), agents.end(), character_name) != agents.end();
  survey_.emplace(who, std::move(slot));

  if (static_cast<int>(survey_.size()) == human_count_locked()) {
    // Reveal strictly after the last guess.
    reveal_scheduled_ = true;
    schedule_locked(now + Duration{1}, [](GameSession& s) {
      std::lock_guard lock(s.mu_);
      s.reveal_locked(s.clock_.now());
    });
  }
}

void GameSession::submit_scores(const PlayerId& who, std::optional<int> human_similarity, std::optional<int> timing,
                                 std::optional<int> relevance) {
  std::lock_guard lock(mu_);
  const TimePoint now = clock_.now();
  if (stage_ != SessionStage::Finished) throw Error(Errc::GameOngoing, "the survey opens when the game ends");
  const Participant* p = participant_locked(who);
  if (!p || p->is_agent) throw Error(Errc::UnknownPlayer, "not a human participant of this game");
  if (!revealed_at_) throw Error(Errc::NotPermitted, "scores are collected after the reveal");
  if (survey_closed_) throw Error(Errc::SurveyClosed, "the survey is closed");
  for (auto v : {human_similarity, timing, relevance})
    if (v && (*v < 1 || *v > 5)) throw Error(Errc::InvalidFrame, "scores must be between 1 and 5");

  auto [it, inserted] = survey_.try_emplace(who);
  auto& slot = it->second;
  if (inserted) slot.response.respondent = who;
  if (slot.written || slot.response.scored_at) throw Error(Errc::DuplicateSubmission, "scores already submitted");
  slot.response.human_similarity = human_similarity;
  slot.response.timing = timing;
  slot.response.relevance = relevance;
  slot.response.scored_at = now;
  write_survey_locked(slot, now);

  const bool all_done = static_cast<int>(survey_.size()) == human_count_locked() &&
                        std::all_of(survey_.begin(), survey_.end(), [](const auto& kv) { return kv.second.written; });
  if (all_done) survey_closed_ = true;
}

std::vector<SurveyResponse> GameSession::collect_survey() const {
  std::lock_guard lock(mu_);
  if (stage_ != SessionStage::Finished) throw Error(Errc::GameOngoing, "game is still running");
  std::vector<SurveyResponse> out;
  for (const auto& [_, slot] : survey_) {
    SurveyResponse r = slot.response;
    r.partial = !(r.human_similarity && r.timing && r.relevance && r.guessed_agent);
    out.push_back(std::move(r));
  }
  return out;
}

bool GameSession::survey_closed() const {
  std::lock_guard lock(mu_);
  return survey_closed_;
}

// ---- player commands ----

Seq GameSession::send_message(const PlayerId& who, std::string_view content) {
  std::lock_guard lock(mu_);
  if (stage_ == SessionStage::Lobby) throw Error(Errc::NotPermitted, "the game has not started");
  if (stage_ == SessionStage::Finished) throw Error(Errc::GameFinished, "the game is over");
  if (state_.tallied) throw Error(Errc::NotPermitted, "the phase is closing");
  const Participant* p = participant_locked(who);
  if (!p || p->is_agent) throw Error(Errc::UnknownPlayer, "not a human participant of this game");
  const ChatMessage& m = room_->append(state_, who, content, clock_.now());
  post_locked(m);
  return m.seq;
}

void GameSession::cast_vote_locked(const PlayerId& who, std::string_view target_name, TimePoint now) {
  if (stage_ != SessionStage::Running) throw Error(Errc::GameFinished, "voting is closed");
  const Player* target = state_.find_by_name(target_name);
  if (!target) throw Error(Errc::InvalidTarget, "no player named '" + std::string(target_name) + "'");
  state_ = amafia::cast_vote(state_, who, target->id, now);
  const Vote& v = state_.votes.at(who);
  archive_->write_event(now, VoteEvent{v});
  const bool night = v.kind == PhaseKind::Nighttime;
  broadcast_locked(vote_frame_locked(v), [night](const Player& p) { return !night || p.role == Role::Mafia; });
}

void GameSession::cast_vote(const PlayerId& who, std::string_view target_name) {
  std::lock_guard lock(mu_);
  const Participant* p = participant_locked(who);
  if (!p || p->is_agent) throw Error(Errc::UnknownPlayer, "not a human participant of this game");
  cast_vote_locked(who, target_name, clock_.now());
}

std::optional<nlohmann::json> GameSession::handle_frame(const PlayerId& who, const ClientFrame& frame) {
  try {
    struct Visitor {
      GameSession& s;
      const PlayerId& who;
      std::optional<nlohmann::json> operator()(const SendMessageFrame& f) {
        s.send_message(who, f.content);
        return std::nullopt;
      }
      std::optional<nlohmann::json> operator()(const CastVoteFrame& f) {
        s.cast_vote(who, f.target);
        return std::nullopt;
      }
      std::optional<nlohmann::json> operator()(const SurveyGuessFrame& f) {
        s.submit_guess(who, f.guess);
        return nlohmann::json{{"type", "survey_ack"}, {"stage", "guess"}};
      }
      std::optional<nlohmann::json> operator()(const SurveyScoresFrame& f) {
        s.submit_scores(who, f.human_similarity, f.timing, f.relevance);
        return nlohmann::json{{"type", "survey_ack"}, {"stage", "scores"}};
      }
    };
    return std::visit(Visitor{*this, who}, frame);
  } catch (const Error& e) {
    return error_frame(e.code(), e.what());
  }
}

// ---- views ----

nlohmann::json GameSession::client_view(const PlayerId& who) const {
  std::lock_guard lock(mu_);
  const Participant* part = participant_locked(who);
  if (!part) throw Error(Errc::UnknownPlayer, "not a participant of this game");
  const TimePoint now = clock_.now();
  nlohmann::json v = {{"type", "state"},
                      {"protocol", kProtocolVersion},
                      {"game_id", id_},
                      {"stage", to_string(stage_)},
                      {"now", to_millis(now)},
                      {"consent_version", config_.consent_version},
                      {"roster_size", config_.roster_size},
                      {"joined", participants_.size()}};
  nlohmann::json me = {{"name", part->character_name}};
  if (stage_ == SessionStage::Lobby) {
    v["me"] = me;
    return v;
  }

  const Player& self = player_locked(who);
  const bool over = stage_ == SessionStage::Finished;
  me["role"] = to_string(self.role);
  me["alive"] = self.alive;
  if (self.role == Role::Mafia) {
    nlohmann::json mates = nlohmann::json::array();
    for (const auto& p : state_.players)
      if (p.role == Role::Mafia) mates.push_back(p.character_name);
    me["teammates"] = mates;
  }
  me["can_speak"] = !over && !state_.tallied && state_.admitted(who);
  v["me"] = me;

  nlohmann::json players = nlohmann::json::array();
  for (const auto& p : state_.players) {
    nlohmann::json e = {{"name", p.character_name}, {"alive", p.alive}};
    if (over) e["role"] = to_string(p.role);
    players.push_back(e);
  }
  v["players"] = players;

  const auto& ph = state_.phase;
  v["phase"] = {{"index", ph.index},
                {"kind", to_string(ph.kind)},
                {"start", to_millis(ph.start)},
                {"deadline", to_millis(ph.deadline())},
                {"remaining_ms", over ? 0 : std::max<std::int64_t>(0, (ph.deadline() - now).count())}};

  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : room_->visible_history(state_, who, std::nullopt, now).messages)
    msgs.push_back(message_frame(m));
  v["messages"] = msgs;

  const bool sees_votes = ph.kind == PhaseKind::Daytime || self.role == Role::Mafia;
  nlohmann::json votes = nlohmann::json::array();
  if (!over && sees_votes)
    for (const auto& [_, vote] : state_.votes) votes.push_back(vote_frame_locked(vote));
  v["votes"] = votes;
  auto mine = state_.votes.find(who);
  v["my_vote"] = (!over && mine != state_.votes.end()) ? nlohmann::json(player_locked(mine->second.target).character_name)
                                                       : nlohmann::json(nullptr);
  v["outcome"] = to_string(state_.outcome);

  std::string survey_stage = "none";
  if (over && !part->is_agent) {
    auto it = survey_.find(who);
    if (survey_closed_)
      survey_stage = "closed";
    else if (!revealed_at_)
      survey_stage = it == survey_.end() ? "guess" : "await_reveal";
    else
      survey_stage = (it != survey_.end() && it->second.response.scored_at) ? "done" : "scores";
    if (revealed_at_) v["agent_names"] = agent_names_locked();
  }
  v["survey"] = {{"stage", survey_stage}};
  return v;
}

nlohmann::json GameSession::public_summary() const {
  std::lock_guard lock(mu_);
  nlohmann::json j = {{"game_id", id_},
                      {"stage", to_string(stage_)},
                      {"roster_size", config_.roster_size},
                      {"joined", participants_.size()},
                      {"day_ms", config_.day_duration.count()},
                      {"night_ms", config_.night_duration.count()},
                      {"consent_version", config_.consent_version}};
  if (stage_ != SessionStage::Lobby) j["outcome"] = to_string(state_.outcome);
  return j;
}

std::uint64_t GameSession::subscribe(const PlayerId& who, FrameSink sink) {
  std::lock_guard lock(mu_);
  if (!participant_locked(who)) throw Error(Errc::UnknownPlayer, "not a participant of this game");
  const std::uint64_t id = next_subscriber_++;
  if (stage_ != SessionStage::Lobby)
    if (const Player* p = state_.find(who)) sink(role_packet_locked(*p));
  subscribers_.emplace(id, Subscriber{who, std::move(sink)});
  return id;
}

void GameSession::unsubscribe(std::uint64_t subscription) {
  std::lock_guard lock(mu_);
  subscribers_.erase(subscription);
}

std::string GameSession::export_log(bool force) const {
  std::lock_guard lock(mu_);
  if (!archive_ || (!force && stage_ != SessionStage::Finished))
    throw Error(Errc::GameOngoing, "the log is exported once the game ends");
  return encode_log(archive_->log());
}

GameLog GameSession::log_copy() const {
  std::lock_guard lock(mu_);
  if (!archive_) throw Error(Errc::GameOngoing, "the game has not started");
  return archive_->log();
}

std::optional<std::filesystem::path> GameSession::log_path() const {
  std::lock_guard lock(mu_);
  if (!archive_) return std::nullopt;
  return archive_->path();
}

SessionStage GameSession::stage() const {
  std::lock_guard lock(mu_);
  return stage_;
}

Outcome GameSession::outcome() const {
  std::lock_guard lock(mu_);
  return state_.outcome;
}

GameState GameSession::state_copy() const {
  std::lock_guard lock(mu_);
  return state_;
}

// ---- AgentHost ----

AgentView GameSession::agent_view(const PlayerId& agent) const {
  std::lock_guard lock(mu_);
  AgentView v;
  if (stage_ == SessionStage::Lobby) return v;
  v.outcome = state_.outcome;
  const Player* self = state_.find(agent);
  if (!self) return v;
  v.alive = self->alive;
  v.phase = state_.phase;
  v.tallied = state_.tallied;
  v.admitted = state_.admitted(agent);
  const bool night = state_.phase.kind == PhaseKind::Nighttime;
  v.can_vote = self->alive && state_.outcome == Outcome::Ongoing && !state_.tallied &&
               (!night || self->role == Role::Mafia);
  v.has_voted = state_.votes.contains(agent);
  v.n_active = static_cast<int>(state_.admitted_speakers().size());
  for (const auto& p : state_.players)
    if (p.alive && p.id != agent && (!night || p.role == Role::Bystander)) v.vote_candidates.push_back(p.character_name);
  return v;
}

ContextSnapshot GameSession::snapshot(const PlayerId& agent) const {
  std::lock_guard lock(mu_);
  if (!room_) throw Error(Errc::NotPermitted, "the game has not started");
  return room_->visible_history(state_, agent, std::nullopt, clock_.now());
}

std::optional<Seq> GameSession::publish(const PlayerId& agent, const std::string& text, const Phase& phase) {
  std::lock_guard lock(mu_);
  if (stage_ != SessionStage::Running || state_.tallied || !(state_.phase == phase) || !state_.admitted(agent))
    return std::nullopt;
  try {
    const ChatMessage& m = room_->append(state_, agent, text, clock_.now());
    post_locked(m);
    return m.seq;
  } catch (const Error& e) {
    spdlog::debug("game {}: agent message rejected: {}", id_, e.what());
    return std::nullopt;
  }
}

bool GameSession::vote(const PlayerId& agent, const std::string& target_name) {
  std::lock_guard lock(mu_);
  try {
    cast_vote_locked(agent, target_name, clock_.now());
    return true;
  } catch (const Error& e) {
    spdlog::debug("game {}: agent vote rejected: {}", id_, e.what());
    return false;
  }
}

void GameSession::record_decision(const AgentDecisionRecord& record) {
  std::lock_guard lock(mu_);
  if (!archive_) return;
  archive_->write_event(clock_.now(), AgentDecisionEvent{record.agent, record});
}

void GameSession::record_vote(const AgentVoteRecord& record) {
  std::lock_guard lock(mu_);
  if (!archive_) return;
  archive_->write_event(clock_.now(), AgentVoteEvent{record.agent, record});
}

// ---- helpers ----

void GameSession::announce_locked(std::string_view text, TimePoint now, Scope scope) {
  post_locked(room_->announce(state_, text, now, scope));
}

void GameSession::post_locked(const ChatMessage& m) {
  archive_->write_event(m.timestamp, MessageEvent{m});
  const Scope scope = m.scope;
  broadcast_locked(message_frame(m), [scope](const Player& p) { return visible_to(scope, p.role); });
}

void GameSession::broadcast_locked(const nlohmann::json& frame, const std::function<bool(const Player&)>& audience) {
  for (const auto& [_, sub] : subscribers_) {
    const Player* p = state_.find(sub.who);
    if (!p || !audience(*p)) continue;
    try {
      sub.sink(frame);
    } catch (const std::exception& e) {
      spdlog::warn("game {}: frame sink failed: {}", id_, e.what());
    }
  }
}

nlohmann::json GameSession::role_packet_locked(const Player& p) const {
  nlohmann::json j = {{"type", "role_packet"}, {"name", p.character_name}, {"role", to_string(p.role)}};
  if (p.role == Role::Mafia) {
    nlohmann::json mates = nlohmann::json::array();
    for (const auto& q : state_.players)
      if (q.role == Role::Mafia) mates.push_back(q.character_name);
    j["teammates"] = mates;
  }
  return j;
}

nlohmann::json GameSession::phase_frame_locked(std::string_view edge) const {
  const auto& ph = state_.phase;
  nlohmann::json living = nlohmann::json::array();
  for (const auto& p : state_.players)
    if (p.alive) living.push_back(p.character_name);
  return {{"type", "phase_event"},       {"edge", edge},
          {"phase_index", ph.index},     {"kind", to_string(ph.kind)},
          {"start", to_millis(ph.start)}, {"deadline", to_millis(ph.deadline())},
          {"duration_ms", ph.duration.count()}, {"living", living}};
}

nlohmann::json GameSession::vote_frame_locked(const Vote& v) const {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [target, c] : current_counts(state_)) counts[player_locked(target).character_name] = c;
  return {{"type", "vote_update"},
          {"voter", player_locked(v.voter).character_name},
          {"target", player_locked(v.target).character_name},
          {"phase_index", v.phase_index},
          {"kind", to_string(v.kind)},
          {"ts", to_millis(v.timestamp)},
          {"counts", counts}};
}

const GameSession::Participant* GameSession::participant_locked(const PlayerId& id) const {
  for (const auto& p : participants_)
    if (p.id == id) return &p;
  return nullptr;
}

const Player& GameSession::player_locked(const PlayerId& id) const {
  const Player* p = state_.find(id);
  if (!p) throw Error(Errc::UnknownPlayer, "unknown player " + id.value);
  return *p;
}

std::vector<std::string> GameSession::agent_names_locked() const {
  std::vector<std::string> out;
  for (const auto& p : participants_)
    if (p.is_agent) out.push_back(p.character_name);
  return out;
}

int GameSession::human_count_locked() const {
  return static_cast<int>(std::count_if(participants_.begin(), participants_.end(),
                                        [](const Participant& p) { return !p.is_agent; }));
}

}  // namespace amafia
