// SPDX-License-Identifier: Apache-2.0
#include "amafia/server/game_server.hpp"

#include <cstdio>

#include "amafia/digest.hpp"
#include "amafia/error.hpp"

namespace amafia {

GameServer::GameServer(Clock& clock, std::shared_ptr<ChatProvider> llm, ServerOptions options)
    : clock_(clock), llm_(std::move(llm)), options_(std::move(options)) {}

std::string GameServer::create_game(GameConfig config) {
  std::lock_guard lock(mu_);
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "g%04d-", next_++);
  std::string id = prefix + random_token(4);
  SessionOptions so;
  so.log_dir = options_.log_dir;
  so.spawn_agent_threads = options_.spawn_agent_threads;
  games_.emplace(id, GameSession::create(id, std::move(config), clock_, llm_, so));
  return id;
}

std::shared_ptr<GameSession> GameServer::game(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = games_.find(id);
  if (it == games_.end()) throw Error(Errc::UnknownGame, "no game '" + id + "'");
  return it->second;
}

std::vector<std::string> GameServer::game_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : games_) out.push_back(id);
  return out;
}

bool GameServer::is_admin(std::string_view token) const {
  return !options_.admin_token.empty() && token == options_.admin_token;
}

}  // namespace amafia
