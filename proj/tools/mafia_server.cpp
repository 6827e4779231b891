// SPDX-License-Identifier: Apache-2.0
// mafia-server: hosts games over HTTP + WebSocket.
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "amafia/net/net_server.hpp"
#include "amafia/sim/simulation.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous Mafia game server"};
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string config_path;
  std::string log_dir = "logs";
  std::string static_dir;
  std::string admin_token;
  int games = 1;
  int threads = 2;
  bool mock_llm = false;
  std::uint64_t mock_seed = 0;
  std::string log_level = "info";
  app.add_option("--address", address, "Listen address")->capture_default_str();
  app.add_option("--port", port, "Listen port (0 picks a free one)")->capture_default_str();
  app.add_option("--config", config_path, "Game config JSON used for every game")->check(CLI::ExistingFile);
  app.add_option("--log-dir", log_dir, "Directory for game logs")->capture_default_str();
  app.add_option("--static-dir", static_dir, "Web console assets")->check(CLI::ExistingDirectory);
  app.add_option("--admin-token", admin_token, "Token for exporting logs of running games (or AMAFIA_ADMIN_TOKEN)");
  app.add_option("--games", games, "Lobbies to open at startup")->capture_default_str();
  app.add_option("--io-threads", threads, "Network threads")->capture_default_str();
  app.add_flag("--mock-llm", mock_llm, "Use the offline mock model instead of AMAFIA_LLM_URL");
  app.add_option("--mock-seed", mock_seed, "Seed for --mock-llm");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  if (admin_token.empty())
    if (const char* env = std::getenv("AMAFIA_ADMIN_TOKEN")) admin_token = env;

  try {
    std::shared_ptr<amafia::ChatProvider> llm;
    if (mock_llm) {
      auto scripted = std::make_shared<amafia::ScriptedChatProvider>();
      scripted->set_responder(amafia::mock_agent_responder(mock_seed));
      llm = scripted;
    } else if (auto ep = amafia::chat_endpoint_from_env()) {
      llm = std::make_shared<amafia::HttpChatProvider>(*ep);
    } else {
      std::cerr << "no model endpoint: set AMAFIA_LLM_URL or pass --mock-llm\n";
      return 2;
    }

    amafia::GameConfig config;
    if (!config_path.empty()) config = amafia::load_game_config(config_path);
    std::filesystem::create_directories(log_dir);

    amafia::SystemClock clock;
    amafia::ServerOptions so;
    so.log_dir = std::filesystem::path(log_dir);
    so.admin_token = admin_token;
    amafia::GameServer server(clock, llm, so);
    for (int i = 0; i < games; ++i) std::cout << "lobby " << server.create_game(config) << "\n";

    amafia::NetOptions no;
    no.address = address;
    no.port = port;
    no.io_threads = threads;
    if (!static_dir.empty()) no.static_dir = std::filesystem::path(static_dir);
    amafia::NetServer net(server, no);
    net.start();
    std::cout << "listening on http://" << address << ":" << net.port() << "/" << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    net.stop();
  } catch (const amafia::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
