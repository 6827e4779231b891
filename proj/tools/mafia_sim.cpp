// SPDX-License-Identifier: Apache-2.0
// mafia-sim: plays offline games (scripted bots + mock-LLM agent) under a
// virtual clock and writes their logs.
#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "amafia/error.hpp"
#include "amafia/sim/simulation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulated Mafia games with a mock agent"};
  std::string out_dir = "sim-logs";
  int games = 10;
  std::uint64_t seed = 1;
  int bots = 7;
  int agents = 1;
  int day_s = 120;
  int night_s = 60;
  int max_rounds = 15;
  bool no_survey = false;
  app.add_option("--out", out_dir, "Log directory")->capture_default_str();
  app.add_option("--games", games, "Number of games")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed of the first game; game i uses seed + i")->capture_default_str();
  app.add_option("--bots", bots, "Scripted players per game")->capture_default_str();
  app.add_option("--agents", agents, "Mock-LLM agents per game")->capture_default_str();
  app.add_option("--day", day_s, "Daytime seconds")->capture_default_str();
  app.add_option("--night", night_s, "Nighttime seconds")->capture_default_str();
  app.add_option("--max-rounds", max_rounds, "Abort after this many rounds")->capture_default_str();
  app.add_flag("--no-survey", no_survey, "Skip the post-game survey");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  try {
    std::filesystem::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < games; ++i) {
      amafia::SimConfig cfg;
      cfg.seed = seed + static_cast<std::uint64_t>(i);
      cfg.bots = bots;
      cfg.agents = agents;
      cfg.day_duration = std::chrono::seconds{day_s};
      cfg.night_duration = std::chrono::seconds{night_s};
      cfg.max_rounds = max_rounds;
      cfg.survey = !no_survey;
      cfg.log_dir = std::filesystem::path(out_dir);
      const auto r = amafia::run_simulated_game(cfg);
      std::cout << (r.log_path ? r.log_path->string() : "-") << "  " << amafia::to_string(r.outcome) << "  "
                << r.log.events.size() << " events\n";
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    std::cout << games << " games in " << ms.count() << " ms\n";
  } catch (const amafia::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
