// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "amafia/server/game_session.hpp"

namespace amafia {

struct ServerOptions {
  std::optional<std::filesystem::path> log_dir;
  /// Token that unlocks log export of running games. Empty disables it.
  std::string admin_token;
  bool spawn_agent_threads = true;
};

/// Registry of independent games. Games never share state; the registry lock
/// only guards the map itself.
class GameServer {
 public:
  GameServer(Clock& clock, std::shared_ptr<ChatProvider> llm, ServerOptions options = {});

  /// Throws InvalidConfig.
  std::string create_game(GameConfig config);
  /// Throws UnknownGame.
  std::shared_ptr<GameSession> game(const std::string& id) const;
  std::vector<std::string> game_ids() const;

  bool is_admin(std::string_view token) const;
  const ServerOptions& options() const { return options_; }
  Clock& clock() { return clock_; }

 private:
  Clock& clock_;
  std::shared_ptr<ChatProvider> llm_;
  ServerOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<GameSession>> games_;
  int next_ = 1;
};

}  // namespace amafia
