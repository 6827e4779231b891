// SPDX-License-Identifier: Apache-2.0
#include "amafia/sim/simulation.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "amafia/error.hpp"
#include "amafia/rng.hpp"
#include "amafia/server/game_session.hpp"

namespace amafia {

namespace {

constexpr std::array<std::string_view, 24> kChatter = {
    "hi everyone",
    "ok who do we think it is",
    "i'm just a regular townie lol",
    "that was fast",
    "hmm not sure yet",
    "why so quiet {name}?",
    "{name} is acting kinda sus",
    "i trust {name} for now",
    "let's not rush the vote",
    "agree",
    "no way it's me",
    "we need to pick someone",
    "{name} what do you think?",
    "someone is lying here",
    "i'm voting {name}",
    "wait what",
    "lol",
    "that's what mafia would say",
    "can we talk about last night?",
    "nobody defended {name} yesterday",
    "i have a bad feeling about {name}",
    "ok fine",
    "who hasn't talked yet?",
    "same",
};

constexpr std::array<std::string_view, 6> kNightChatter = {
    "who should we take out",
    "let's go for {name}",
    "{name} is getting close to us",
    "ok agreed",
    "keep it quiet tomorrow",
    "vote {name}",
};

std::string fill(std::string_view tpl, std::string_view name) {
  std::string out(tpl);
  if (auto pos = out.find("{name}"); pos != std::string::npos) out.replace(pos, 6, name);
  return out;
}

std::vector<std::string> split_names(std::string_view list) {
  std::vector<std::string> out;
  while (!list.empty()) {
    auto comma = list.find(", ");
    out.emplace_back(list.substr(0, comma));
    list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 2);
  }
  return out;
}

/// One scripted human stand-in. Plans its messages and vote for each phase
/// when the phase starts; all actions are clock timers, so the bot never
/// blocks and never runs inside the session lock.
class Bot {
 public:
  Bot(std::shared_ptr<GameSession> session, VirtualClock& clock, PlayerId id, std::uint64_t seed, double chattiness)
      : session_(std::move(session)), clock_(clock), id_(std::move(id)), rng_(seed), chattiness_(chattiness) {}

  // Called from inside the session lock: only schedule.
  void on_frame(const nlohmann::json& frame) {
    const std::string type = frame.value("type", "");
    if (type == "role_packet" || (type == "phase_event" && frame.value("edge", "") == "start"))
      clock_.schedule_at(clock_.now(), [this] { plan_phase(); });
    else if (type == "phase_event" && frame.value("edge", "") == "game_over")
      clock_.schedule_at(clock_.now(), [this] { plan_survey_guess(); });
    else if (type == "reveal")
      clock_.schedule_at(clock_.now(), [this] { plan_survey_scores(); });
  }

 private:
  void plan_phase() {
    const auto view = session_->client_view(id_);
    if (view.value("stage", "") != "running" || !view.contains("phase")) return;
    const auto& ph = view["phase"];
    const int index = ph["index"].get<int>();
    const std::string kind = ph["kind"].get<std::string>();
    if (!planned_.insert({index, kind}).second) return;
    const auto& me = view["me"];
    if (!me["alive"].get<bool>()) return;
    const bool mafia = me["role"] == "mafia";
    const bool night = kind == "Nighttime";
    if (night && !mafia) return;

    std::set<std::string> teammates;
    if (mafia)
      for (const auto& t : me["teammates"]) teammates.insert(t.get<std::string>());
    std::vector<std::string> others;
    std::vector<std::string> targets;
    for (const auto& p : view["players"]) {
      const std::string name = p["name"].get<std::string>();
      if (!p["alive"].get<bool>() || name == me["name"]) continue;
      others.push_back(name);
      // Mafia bots never vote for a teammate; at night they cannot.
      if (!mafia || !teammates.contains(name)) targets.push_back(name);
    }
    if (others.empty()) return;

    const TimePoint start = from_millis(ph["start"].get<std::int64_t>());
    const TimePoint deadline = from_millis(ph["deadline"].get<std::int64_t>());
    const auto span = (deadline - start).count();
    const int max_msgs = night ? 3 : static_cast<int>(2 + chattiness_ * 10);
    const int n_msgs = static_cast<int>(rng_.below(static_cast<std::uint64_t>(max_msgs) + 1));
    for (int i = 0; i < n_msgs; ++i) {
      const TimePoint at = start + Duration{1 + static_cast<std::int64_t>(rng_.below(span - 1))};
      std::string text = night ? fill(kNightChatter[rng_.below(kNightChatter.size())], pick(targets.empty() ? others : targets))
                               : fill(kChatter[rng_.below(kChatter.size())], pick(others));
      clock_.schedule_at(at, [this, text = std::move(text)] { act([&] { session_->send_message(id_, text); }); });
    }
    if (!targets.empty() && rng_.uniform() < 0.92) {
      const auto offset = static_cast<std::int64_t>(span * (0.4 + 0.55 * rng_.uniform()));
      std::string target = pick(targets);
      clock_.schedule_at(start + Duration{offset},
                         [this, target = std::move(target)] { act([&] { session_->cast_vote(id_, target); }); });
    }
  }

  void plan_survey_guess() {
    const auto view = session_->client_view(id_);
    std::vector<std::string> names;
    for (const auto& p : view["players"])
      if (p["name"] != view["me"]["name"]) names.push_back(p["name"].get<std::string>());
    if (names.empty() || rng_.uniform() < 0.05) return;  // some players leave without answering
    std::string guess = pick(names);
    clock_.schedule_at(clock_.now() + Duration{3000 + static_cast<std::int64_t>(rng_.below(40'000))},
                       [this, guess = std::move(guess)] { act([&] { session_->submit_guess(id_, guess); }); });
  }

  void plan_survey_scores() {
    auto score = [this]() -> std::optional<int> {
      if (rng_.uniform() < 0.1) return std::nullopt;
      return 1 + static_cast<int>(rng_.below(5));
    };
    auto a = score(), b = score(), c = score();
    clock_.schedule_at(clock_.now() + Duration{2000 + static_cast<std::int64_t>(rng_.below(30'000))},
                       [this, a, b, c] { act([&] { session_->submit_scores(id_, a, b, c); }); });
  }

  std::string pick(const std::vector<std::string>& v) { return v[rng_.below(v.size())]; }

  template <typename F>
  void act(F&& f) {
    try {
      f();
    } catch (const Error& e) {
      // Phase closed or player eliminated in the meantime: a human would see
      // the same rejection.
      spdlog::trace("bot {}: {}", id_.value, e.what());
    }
  }

  std::shared_ptr<GameSession> session_;
  VirtualClock& clock_;
  PlayerId id_;
  SeededRng rng_;
  double chattiness_;
  std::set<std::pair<int, std::string>> planned_;
};

}  // namespace

ScriptedChatProvider::Responder mock_agent_responder(std::uint64_t seed, double send_probability) {
  auto rng = std::make_shared<SeededRng>(derive_seed(seed, 0x6d6f636bULL));
  auto mu = std::make_shared<std::mutex>();
  return [rng, mu, send_probability](const CompletionRequest& req) -> std::string {
    std::lock_guard lock(*mu);
    const std::string& system = req.messages.front().content;
    const std::string& user = req.messages.back().content;
    static constexpr std::string_view kVoteMarker = "Reply only with exactly one of these names: ";
    if (auto pos = user.find(kVoteMarker); pos != std::string::npos) {
      auto start = pos + kVoteMarker.size();
      auto names = split_names(std::string_view(user).substr(start, user.find('\n', start) - start));
      if (rng->uniform() < 0.1) return "I'm not sure.";
      return names[rng->below(names.size())];
    }
    if (system.find("<wait>") != std::string::npos) {
      if (rng->uniform() < 0.02) return "<wait> or <send>";  // malformed now and then
      return rng->uniform() < send_probability ? "<send>" : "<wait>";
    }
    std::string line(kChatter[rng->below(kChatter.size())]);
    if (auto p = line.find("{name}"); p != std::string::npos) line.replace(p, 6, "guys");
    return line;
  };
}

SimResult run_simulated_game(const SimConfig& cfg) {
  if (cfg.bots < 1 || cfg.agents < 0) throw Error(Errc::InvalidConfig, "simulation needs at least one bot");
  VirtualClock clock;
  auto provider = std::make_shared<ScriptedChatProvider>();
  provider->set_responder(mock_agent_responder(cfg.seed));
  provider->set_latency(&clock, cfg.llm_latency);

  GameConfig gc;
  gc.roster_size = cfg.bots + cfg.agents;
  gc.agent_count = cfg.agents;
  gc.day_duration = cfg.day_duration;
  gc.night_duration = cfg.night_duration;
  gc.max_rounds = cfg.max_rounds;
  gc.rng_seed = cfg.seed;
  gc.survey_window = std::chrono::minutes{2};
  gc.agent.min_iteration_gap = Duration{500};

  SessionOptions so;
  so.log_dir = cfg.log_dir;
  so.spawn_agent_threads = false;
  so.source = "simulated";
  auto session = GameSession::create("sim-" + std::to_string(cfg.seed), gc, clock,
                                     cfg.agents > 0 ? provider : nullptr, so);

  SeededRng rng(derive_seed(cfg.seed, 0x626f7473ULL));
  std::vector<std::unique_ptr<Bot>> bots;
  for (int i = 0; i < cfg.bots; ++i) {
    PlayerId id("bot-" + std::to_string(i + 1));
    bots.push_back(std::make_unique<Bot>(session, clock, id, rng.next(), rng.uniform()));
    session->join(id.value, true);
    session->subscribe(id, [bot = bots.back().get(), survey = cfg.survey](const nlohmann::json& f) {
      if (!survey && f.value("type", "") == "phase_event" && f.value("edge", "") == "game_over") return;
      bot->on_frame(f);
    });
  }

  SimResult result;
  for (AgentRuntime* agent : session->agents()) {
    agent->run(*session);
    result.agent_iterations += agent->iterations();
  }
  while (session->stage() != SessionStage::Finished && clock.advance_to_next()) {
  }
  if (cfg.survey)
    while (!session->survey_closed() && clock.advance_to_next()) {
    }

  result.log = session->log_copy();
  result.outcome = session->outcome();
  result.log_path = session->log_path();
  return result;
}

}  // namespace amafia
