// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "amafia/agent/agent_runtime.hpp"
#include "amafia/archive/game_log.hpp"
#include "amafia/chat/chat_room.hpp"
#include "amafia/clock.hpp"
#include "amafia/game/game_core.hpp"
#include "amafia/llm/gateway.hpp"
#include "amafia/server/frames.hpp"
#include "amafia/server/game_config.hpp"

namespace amafia {

enum class SessionStage : std::uint8_t { Lobby, Running, Finished };
std::string_view to_string(SessionStage s) noexcept;

struct JoinResult {
  PlayerId participant;
  std::string character_name;
  std::string token;  // opaque session token for the frame channel
};

struct SessionOptions {
  std::optional<std::filesystem::path> log_dir;  // unset: archive kept in memory only
  /// Run each agent on its own thread. Virtual-clock drivers turn this off
  /// and call agents()[i]->run(session) themselves.
  bool spawn_agent_threads = true;
  std::string source = "live";
};

/// One game from lobby to survey. Every mutation takes the session mutex, so
/// commands from sockets, timers and agent threads apply one at a time in
/// arrival order. Frame sinks are called with that mutex held: they must only
/// enqueue and never call back into the session.
class GameSession final : public AgentHost, public std::enable_shared_from_this<GameSession> {
 public:
  using FrameSink = std::function<void(const nlohmann::json&)>;

  /// Validates the config and opens the lobby; agent seats are taken
  /// immediately. `llm` may be null only when config.agent_count == 0.
  static std::shared_ptr<GameSession> create(std::string id, GameConfig config, Clock& clock,
                                             std::shared_ptr<ChatProvider> llm, SessionOptions options = {});
  ~GameSession() override;
  GameSession(const GameSession&) = delete;
  GameSession& operator=(const GameSession&) = delete;

  const std::string& id() const { return id_; }
  const GameConfig& config() const { return config_; }
  std::string_view consent() const { return consent_text(config_.consent_version); }

  /// Takes a seat. Idempotent for a participant that already joined.
  /// Throws NoConsent, LobbyFull, LobbyClosed. The last seat starts the game.
  JoinResult join(const std::string& participant_id, bool consent_acknowledged);
  std::optional<PlayerId> participant_for_token(std::string_view token) const;

  Seq send_message(const PlayerId& who, std::string_view content);
  void cast_vote(const PlayerId& who, std::string_view target_name);
  /// Stage one of the survey; closed once the agent has been revealed.
  void submit_guess(const PlayerId& who, std::string_view character_name);
  /// Stage two; only after the reveal. Missing scores produce a partial record.
  void submit_scores(const PlayerId& who, std::optional<int> human_similarity, std::optional<int> timing,
                     std::optional<int> relevance);
  /// Applies a client frame. Rule violations come back as an error frame;
  /// acknowledgements for survey stages as a survey_ack frame.
  std::optional<nlohmann::json> handle_frame(const PlayerId& who, const ClientFrame& frame);

  /// Everything `who` may currently see: the resync snapshot for clients.
  nlohmann::json client_view(const PlayerId& who) const;
  /// Lobby-level information with no roles.
  nlohmann::json public_summary() const;

  std::uint64_t subscribe(const PlayerId& who, FrameSink sink);
  void unsubscribe(std::uint64_t subscription);

  /// Throws GameOngoing before the game ends.
  std::vector<SurveyResponse> collect_survey() const;
  /// Whole archive as text. Throws GameOngoing unless `force`.
  std::string export_log(bool force = false) const;
  GameLog log_copy() const;
  std::optional<std::filesystem::path> log_path() const;

  SessionStage stage() const;
  Outcome outcome() const;
  bool survey_closed() const;
  GameState state_copy() const;

  std::vector<AgentRuntime*> agents();
  /// Stops and joins agent threads.
  void stop_agents();

  // AgentHost
  AgentView agent_view(const PlayerId& agent) const override;
  ContextSnapshot snapshot(const PlayerId& agent) const override;
  std::optional<Seq> publish(const PlayerId& agent, const std::string& text, const Phase& phase) override;
  bool vote(const PlayerId& agent, const std::string& target_name) override;
  void record_decision(const AgentDecisionRecord& record) override;
  void record_vote(const AgentVoteRecord& record) override;

 private:
  struct Participant {
    PlayerId id;
    std::string character_name;
    std::string token;
    bool is_agent = false;
  };
  struct Subscriber {
    PlayerId who;
    FrameSink sink;
  };
  struct SurveySlot {
    SurveyResponse response;
    bool written = false;
  };

  GameSession(std::string id, GameConfig config, Clock& clock, std::shared_ptr<ChatProvider> llm,
              SessionOptions options);

  void start_game_locked(TimePoint now);
  void on_phase_expired(int phase_index, PhaseKind kind);
  void begin_phase_locked(const std::optional<PlayerId>& revealed_victim, TimePoint now);
  void finish_locked(TimePoint now);
  void reveal_locked(TimePoint now);
  void close_survey_locked(TimePoint now);
  void write_survey_locked(SurveySlot& slot, TimePoint now);
  void schedule_locked(TimePoint when, std::function<void(GameSession&)> fn);

  void announce_locked(std::string_view text, TimePoint now, Scope scope = Scope::System);
  void post_locked(const ChatMessage& m);
  void broadcast_locked(const nlohmann::json& frame, const std::function<bool(const Player&)>& audience);
  nlohmann::json role_packet_locked(const Player& p) const;
  nlohmann::json phase_frame_locked(std::string_view edge) const;
  nlohmann::json vote_frame_locked(const Vote& v) const;
  void cast_vote_locked(const PlayerId& who, std::string_view target_name, TimePoint now);

  const Participant* participant_locked(const PlayerId& id) const;
  const Player& player_locked(const PlayerId& id) const;
  std::vector<std::string> agent_names_locked() const;
  int human_count_locked() const;

  std::string id_;
  GameConfig config_;
  Clock& clock_;
  std::shared_ptr<ChatProvider> llm_;
  SessionOptions options_;
  std::vector<std::string> names_;  // shuffled pool, consumed in join order

  mutable std::mutex mu_;
  SessionStage stage_ = SessionStage::Lobby;
  std::vector<Participant> participants_;
  GameState state_;
  std::optional<ChatRoom> room_;
  std::unique_ptr<ArchiveWriter> archive_;
  std::map<std::uint64_t, Subscriber> subscribers_;
  std::uint64_t next_subscriber_ = 1;
  std::vector<TimerId> timers_;
  TimePoint finished_at_{};
  std::optional<TimePoint> revealed_at_;
  bool reveal_scheduled_ = false;
  bool survey_closed_ = false;
  std::map<PlayerId, SurveySlot> survey_;

  std::unique_ptr<LlmGateway> gateway_;
  std::vector<std::unique_ptr<AgentRuntime>> agents_;
  std::vector<std::jthread> agent_threads_;
};

}  // namespace amafia
