// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "amafia/server/game_server.hpp"

namespace amafia {

struct NetOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  int io_threads = 1;
};

/// HTTP + WebSocket front end for a GameServer on one port.
///
///   GET  /api/consent[?version=v1]
///   GET  /api/games                       public summaries
///   POST /api/games                       body: GameConfig JSON (may be empty)
///   GET  /api/games/{id}
///   POST /api/games/{id}/join             body: {"participant_id", "consent"}
///   GET  /api/games/{id}/state?token=T    resync snapshot (client view)
///   POST /api/games/{id}/frames?token=T   body: one client frame
///   GET  /api/games/{id}/log[?token=ADMIN]
///   GET  /api/games/{id}/survey[?token=ADMIN]
///   GET  /ws?game={id}&token=T            WebSocket frame channel
///   GET  /, /<asset>                      files under static_dir
class NetServer {
 public:
  NetServer(GameServer& games, NetOptions options);
  ~NetServer();
  NetServer(const NetServer&) = delete;
  NetServer& operator=(const NetServer&) = delete;

  /// Binds and starts the io threads. Throws IOFailure when binding fails.
  void start();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace amafia
