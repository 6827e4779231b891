// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "amafia/archive/game_log.hpp"
#include "amafia/error.hpp"

// Adapter for directory-per-game text dumps. Expected layout of one game:
//
//   <game>/player_names.txt            one character name per line
//   <game>/mafia_names.txt             mafia subset, one per line
//   <game>/config.json                 optional; players[].name / is_llm
//   <game>/public_daytime_chat.txt     "[HH:MM:SS] Name: text" per line
//   <game>/public_nighttime_chat.txt   same, mafia channel
//   <game>/public_manager_chat.txt     same, Game-Manager announcements
//   <game>/who_wins.txt                optional; mentions "mafia" or "bystander"
//
// Phases are rebuilt from the manager's "Now it's Daytime/Nighttime" lines and
// day eliminations from "... was voted out" lines. Votes, survey answers and
// agent prompts are not part of such dumps; the header's config.import.lossy
// array lists what could not be recovered.
namespace amafia {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::UnrecognizedLayout, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

struct RawLine {
  std::int64_t seconds;  // since midnight, unwrapped across days
  std::size_t order;     // file + line order for stable merging
  std::string name;
  std::string text;
  Scope scope;
};

std::vector<RawLine> read_chat(const fs::path& p, Scope scope, std::size_t order_base) {
  static const std::regex line_re(R"(^\[(\d{1,2}):(\d{2}):(\d{2})\]\s*([^:]+?):\s?(.*)$)");
  std::vector<RawLine> out;
  if (!fs::exists(p)) return out;
  std::int64_t day_offset = 0;
  std::int64_t prev = -1;
  std::size_t idx = 0;
  for (const auto& line : read_lines(p)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      // Continuation of a multi-line message.
      if (!out.empty()) out.back().text += " " + line;
      continue;
    }
    std::int64_t s = std::stoll(m[1]) * 3600 + std::stoll(m[2]) * 60 + std::stoll(m[3]);
    if (prev >= 0 && s + 12 * 3600 < prev) day_offset += 24 * 3600;
    prev = s;
    out.push_back({s + day_offset, order_base + idx++, m[4], m[5], scope});
  }
  return out;
}

bool icontains(std::string_view hay, std::string_view needle) {
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
  return it != hay.end();
}

bool looks_like_game_dir(const fs::path& dir) {
  return fs::exists(dir / "player_names.txt") &&
         (fs::exists(dir / "public_daytime_chat.txt") || fs::exists(dir / "public_manager_chat.txt"));
}

GameLog import_game_dir(const fs::path& dir) {
  const auto names = read_lines(dir / "player_names.txt");
  if (names.size() < 2) throw Error(Errc::UnrecognizedLayout, dir.string() + ": player_names.txt too short");
  std::set<std::string> mafia;
  if (fs::exists(dir / "mafia_names.txt"))
    for (const auto& n : read_lines(dir / "mafia_names.txt")) mafia.insert(n);

  std::set<std::string> agents;
  nlohmann::json lossy = nlohmann::json::array();
  if (fs::exists(dir / "config.json")) {
    try {
      auto cfg = nlohmann::json::parse(read_file(dir / "config.json"));
      if (cfg.contains("players"))
        for (const auto& p : cfg["players"])
          if (p.value("is_llm", false)) agents.insert(p.value("name", std::string{}));
    } catch (const nlohmann::json::exception& e) {
      spdlog::warn("{}: unreadable config.json ({})", dir.string(), e.what());
    }
  }
  if (agents.empty()) lossy.push_back("agent_identity");
  if (mafia.empty()) lossy.push_back("roles");
  lossy.push_back("votes");
  lossy.push_back("survey");
  lossy.push_back("agent_prompts");
  lossy.push_back("rng_seed");

  std::vector<RawLine> lines;
  auto append = [&](std::vector<RawLine> v) { lines.insert(lines.end(), v.begin(), v.end()); };
  append(read_chat(dir / "public_manager_chat.txt", Scope::System, 0));
  append(read_chat(dir / "public_daytime_chat.txt", Scope::DaytimePublic, 1'000'000));
  append(read_chat(dir / "public_nighttime_chat.txt", Scope::NighttimeMafia, 2'000'000));
  std::stable_sort(lines.begin(), lines.end(), [](const RawLine& a, const RawLine& b) {
    return std::tie(a.seconds, a.order) < std::tie(b.seconds, b.order);
  });

  GameLog log;
  log.header.game_id = dir.filename().string();
  log.header.source = "import:textdump";
  const TimePoint base = from_millis(0);
  log.header.started_at = lines.empty() ? base : base + std::chrono::seconds{lines.front().seconds};
  std::map<std::string, PlayerId> ids;
  for (std::size_t i = 0; i < names.size(); ++i) {
    PlayerId id("p" + std::to_string(i + 1));
    ids.emplace(names[i], id);
    log.header.roster.push_back(
        {id, names[i], mafia.contains(names[i]) ? Role::Mafia : Role::Bystander, agents.contains(names[i])});
  }
  log.header.config = {{"import", {{"adapter", "textdump"}, {"lossy", lossy}}}};

  static const std::regex voted_out(R"(^(.+?) was voted out)");
  std::int64_t seq = 0;
  Seq chat_seq = 0;
  int phase_index = 0;
  PhaseKind kind = PhaseKind::Daytime;
  bool phase_open = false;
  auto push = [&](TimePoint ts, EventPayload p) {
    LogRecord r;
    r.seq = ++seq;
    r.ts = ts;
    r.payload = std::move(p);
    log.events.push_back(std::move(r));
  };
  TimePoint ts = log.header.started_at;
  for (const auto& l : lines) {
    ts = base + std::chrono::seconds{l.seconds};
    const bool manager = l.scope == Scope::System;
    if (manager) {
      std::optional<PhaseKind> starts;
      if (icontains(l.text, "now it's daytime")) starts = PhaseKind::Daytime;
      if (icontains(l.text, "now it's nighttime")) starts = PhaseKind::Nighttime;
      if (starts) {
        if (phase_open) push(ts, PhaseEvent{PhaseEvent::Edge::End, phase_index, kind, Duration{0}, {}});
        if (*starts == PhaseKind::Daytime || phase_index == 0) ++phase_index;
        kind = *starts;
        phase_open = true;
        push(ts, PhaseEvent{PhaseEvent::Edge::Start, phase_index, kind, Duration{0}, {}});
      }
      std::smatch m;
      if (std::regex_search(l.text, m, voted_out)) {
        auto it = ids.find(m[1].str());
        if (it != ids.end()) push(ts, EliminationEvent{it->second, phase_index, PhaseKind::Daytime, true});
      }
    }
    ChatMessage msg;
    msg.seq = ++chat_seq;
    msg.timestamp = ts;
    msg.content = l.text;
    msg.scope = l.scope;
    msg.phase_index = std::max(phase_index, 1);
    if (manager) {
      msg.author = kGameManager;
      msg.author_name = std::string(kGameManagerName);
    } else {
      auto it = ids.find(l.name);
      if (it == ids.end()) {
        spdlog::warn("{}: message from unlisted player '{}' skipped", dir.string(), l.name);
        --chat_seq;
        continue;
      }
      msg.author = it->second;
      msg.author_name = l.name;
    }
    push(ts, MessageEvent{std::move(msg)});
  }
  if (phase_open) push(ts, PhaseEvent{PhaseEvent::Edge::End, phase_index, kind, Duration{0}, {}});

  Outcome outcome = Outcome::Aborted;
  if (fs::exists(dir / "who_wins.txt")) {
    const std::string who = read_file(dir / "who_wins.txt");
    if (icontains(who, "bystander")) outcome = Outcome::BystanderWin;
    else if (icontains(who, "mafia")) outcome = Outcome::MafiaWin;
  } else {
    log.header.config["import"]["lossy"].push_back("outcome");
  }
  push(ts, OutcomeEvent{outcome, phase_index});
  return log;
}

// Imported agent messages have no decision records; the pairing check does
// not apply to them, so imports skip validate() and only get a structural one.
void check_imported(const GameLog& log) {
  for (std::size_t i = 1; i < log.events.size(); ++i)
    if (log.events[i].ts < log.events[i - 1].ts)
      throw Error(Errc::UnrecognizedLayout, log.header.game_id + ": events out of order");
}

}  // namespace

std::vector<GameLog> import_external(const std::filesystem::path& path, std::string_view adapter) {
  std::vector<GameLog> out;
  if (adapter == "native") {
    if (fs::is_regular_file(path)) {
      out.push_back(read_log(path));
      return out;
    }
    for (const auto& p : list_logs(path)) out.push_back(read_log(p));
    return out;
  }
  if (adapter == "textdump") {
    if (!fs::is_directory(path)) throw Error(Errc::UnrecognizedLayout, path.string() + " is not a directory");
    std::vector<fs::path> dirs;
    if (looks_like_game_dir(path)) {
      dirs.push_back(path);
    } else {
      for (const auto& entry : fs::recursive_directory_iterator(path))
        if (entry.is_directory() && looks_like_game_dir(entry.path())) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      out.push_back(import_game_dir(d));
      check_imported(out.back());
    }
    return out;
  }
  throw Error(Errc::UnrecognizedLayout, "unknown adapter '" + std::string(adapter) + "'");
}

}  // namespace amafia
