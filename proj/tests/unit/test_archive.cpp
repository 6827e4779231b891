// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amafia/archive/game_log.hpp"
#include "amafia/error.hpp"
#include "amafia/sim/simulation.hpp"
#include "support/fixtures.hpp"

using namespace amafia;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

std::size_t schema_line(const std::string& text, ReadOptions opts = {}) {
  try {
    parse_log(text, opts);
  } catch (const SchemaError& e) {
    return e.line();
  }
  return 0;
}

struct TempDir {
  TempDir() {
    path = fs::temp_directory_path() /
           ("amafia-archive-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

GameLog simulated(std::uint64_t seed) {
  SimConfig cfg;
  cfg.seed = seed;
  return run_simulated_game(cfg).log;
}

}  // namespace

TEST(Archive, RoundTripIsByteStable) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GameLog log = fixtures::synthetic_log(seed);
    const std::string text = encode_log(log);
    const GameLog back = parse_log(text);
    ASSERT_EQ(encode_log(back), text) << seed;
    ASSERT_EQ(back.events.size(), log.events.size());
    ASSERT_EQ(back.header.roster.size(), log.header.roster.size());
    EXPECT_TRUE(back.warnings.empty());
  }
}

TEST(Archive, RoundTripKeepsFields) {
  const GameLog log = simulated(3);
  const GameLog back = parse_log(encode_log(log));
  EXPECT_EQ(back.header.game_id, log.header.game_id);
  EXPECT_EQ(back.header.rules.rng_seed, log.header.rules.rng_seed);
  EXPECT_EQ(back.header.rules.day_duration, log.header.rules.day_duration);
  EXPECT_EQ(back.outcome(), log.outcome());
  bool saw_decision = false;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    EXPECT_EQ(back.events[i].seq, log.events[i].seq);
    EXPECT_EQ(back.events[i].ts, log.events[i].ts);
    EXPECT_EQ(event_type(back.events[i].payload), event_type(log.events[i].payload));
    if (const auto* m = log.events[i].as<MessageEvent>()) EXPECT_EQ(back.events[i].as<MessageEvent>()->message, m->message);
    if (const auto* d = log.events[i].as<AgentDecisionEvent>()) {
      saw_decision = true;
      const auto* b = back.events[i].as<AgentDecisionEvent>();
      EXPECT_EQ(b->record.raw_scheduler_output, d->record.raw_scheduler_output);
      EXPECT_EQ(b->record.scheduler_prompt, d->record.scheduler_prompt);
      EXPECT_EQ(b->record.variant_used, d->record.variant_used);
      EXPECT_EQ(b->record.published_seq, d->record.published_seq);
      EXPECT_EQ(b->record.typing_delay, d->record.typing_delay);
      EXPECT_DOUBLE_EQ(b->record.rate, d->record.rate);
    }
  }
  EXPECT_TRUE(saw_decision);
}

TEST(Archive, TornFinalLineIsDroppedWithWarning) {
  const std::string text = encode_log(fixtures::synthetic_log(1));
  auto lines = lines_of(text);
  const std::string last = lines.back();
  lines.back() = last.substr(0, last.size() / 2);
  const GameLog log = parse_log(join(lines), ReadOptions{false});
  EXPECT_EQ(log.events.size(), lines.size() - 2);
  ASSERT_EQ(log.warnings.size(), 1u);
  // Same text without a trailing newline.
  std::string no_nl = join(lines);
  no_nl.pop_back();
  EXPECT_NO_THROW(parse_log(no_nl, ReadOptions{false}));
}

TEST(Archive, CorruptMiddleLineReportsLineNumber) {
  auto lines = lines_of(encode_log(fixtures::synthetic_log(2)));
  ASSERT_GT(lines.size(), 4u);
  lines[2] = "{not json";
  EXPECT_EQ(schema_line(join(lines)), 3u);
}

TEST(Archive, MissingOutcome) {
  auto lines = lines_of(encode_log(fixtures::synthetic_log(4)));
  std::erase_if(lines, [](const std::string& l) { return nlohmann::json::parse(l).at("type") == "outcome"; });
  EXPECT_EQ(schema_line(join(lines)), lines.size());
  EXPECT_NO_THROW(parse_log(join(lines), ReadOptions{false}));
  EXPECT_FALSE(parse_log(join(lines), ReadOptions{false}).outcome());
}

TEST(Archive, StructuralViolations) {
  const auto base = lines_of(encode_log(fixtures::synthetic_log(5)));
  {
    auto lines = base;
    auto j = nlohmann::json::parse(lines[3]);
    j["seq"] = nlohmann::json::parse(lines[2]).at("seq");
    lines[3] = j.dump();
    EXPECT_EQ(schema_line(join(lines)), 4u);
  }
  {
    auto lines = base;
    auto j = nlohmann::json::parse(lines[3]);
    j["ts"] = j["ts"].get<std::int64_t>() - 10'000'000;
    lines[3] = j.dump();
    EXPECT_EQ(schema_line(join(lines)), 4u);
  }
  {
    auto lines = base;
    lines.erase(lines.begin());
    EXPECT_GT(schema_line(join(lines)), 0u);
  }
  {
    auto lines = base;
    lines.push_back(lines[lines.size() - 1]);
    EXPECT_GT(schema_line(join(lines)), 0u);
  }
  EXPECT_EQ(schema_line(""), 1u);
}

TEST(Archive, AgentMessagesNeedSendDecision) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const GameLog log = fixtures::synthetic_log(seed);
    auto lines = lines_of(encode_log(log));
    auto it = std::find_if(lines.begin(), lines.end(),
                           [](const std::string& l) { return nlohmann::json::parse(l).at("type") == "agent_decision"; });
    if (it == lines.end()) continue;
    const std::size_t message_line = static_cast<std::size_t>(it - lines.begin());  // 1-based line of the message
    lines.erase(it);
    EXPECT_EQ(schema_line(join(lines)), message_line) << seed;
    return;
  }
  FAIL() << "no synthetic log had an agent message";
}

TEST(Archive, UnknownFieldsAndTypesSurvive) {
  auto lines = lines_of(encode_log(fixtures::synthetic_log(6)));
  auto h = nlohmann::json::parse(lines[0]);
  h["x_header_note"] = "kept";
  h["data"]["x_header_data"] = 7;
  lines[0] = h.dump();
  auto j = nlohmann::json::parse(lines[1]);
  j["x_top"] = {{"a", 1}};
  j["data"]["x_inner"] = "v";
  lines[1] = j.dump();
  const auto first = nlohmann::json::parse(lines[1]);
  const nlohmann::json unknown = {{"type", "emoji_reaction"},
                                  {"seq", first["seq"].get<std::int64_t>() + 1},
                                  {"ts", first["ts"]},
                                  {"data", {{"emoji", "🙂"}}}};
  // Later records are renumbered so seq stays strictly increasing.
  std::vector<std::string> out{lines[0], lines[1]};
  out.push_back(unknown.dump());
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto r = nlohmann::json::parse(lines[i]);
    r["seq"] = r["seq"].get<std::int64_t>() + 1;
    out.push_back(r.dump());
  }

  const GameLog log = parse_log(join(out));
  EXPECT_EQ(log.header_extra_fields.at("x_header_note"), "kept");
  EXPECT_EQ(log.header_extra_data.at("x_header_data"), 7);
  EXPECT_EQ(log.events[0].extra_fields.at("x_top").at("a"), 1);
  EXPECT_EQ(log.events[0].extra_data.at("x_inner"), "v");
  const auto* u = log.events[1].as<UnknownEvent>();
  ASSERT_NE(u, nullptr);
  EXPECT_EQ(u->type, "emoji_reaction");

  const auto again = lines_of(encode_log(log));
  ASSERT_EQ(again.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    EXPECT_EQ(nlohmann::json::parse(again[i]), nlohmann::json::parse(out[i])) << i;
}

TEST(Archive, WriterEnforcesOrder) {
  ArchiveWriter w;
  EXPECT_THROW(w.write_event(fixtures::t0(), RevealEvent{}), Error);
  LogHeader h;
  h.game_id = "g";
  h.started_at = fixtures::t0();
  w.write_header(h);
  const auto& a = w.write_event(fixtures::t0() + Duration{10}, RevealEvent{});
  EXPECT_EQ(a.seq, 1);
  const auto& b = w.write_event(fixtures::t0(), RevealEvent{});  // earlier ts is clamped
  EXPECT_EQ(b.seq, 2);
  EXPECT_EQ(b.ts, fixtures::t0() + Duration{10});
  w.write_outcome(fixtures::t0() + Duration{20}, OutcomeEvent{Outcome::Aborted, 1});
  EXPECT_THROW(w.write_outcome(fixtures::t0() + Duration{20}, OutcomeEvent{Outcome::Aborted, 1}), Error);
  EXPECT_NO_THROW(parse_log(encode_log(w.log())));
}

TEST(Archive, FileWriterFlushesEveryLine) {
  TempDir dir;
  const fs::path p = dir.path / "sub" / log_file_name(fixtures::t0(), "game-1");
  ArchiveWriter w(p);
  LogHeader h;
  h.game_id = "game-1";
  h.started_at = fixtures::t0();
  w.write_header(h);
  w.write_event(fixtures::t0(), RevealEvent{{"Alex"}});
  const GameLog partial = read_log(p, ReadOptions{false});  // readable mid-game
  EXPECT_EQ(partial.events.size(), 1u);
  EXPECT_EQ(list_logs(dir.path / "sub").size(), 1u);
}

TEST(Archive, FileName) {
  EXPECT_EQ(log_file_name(fixtures::t0(), "abc"), "20231114T221320Z_abc.log");
}

TEST(Replay, SimulatedGamesReplay) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GameLog log = simulated(seed);
    const auto r = replay_log(parse_log(encode_log(log)));
    EXPECT_TRUE(r.ok()) << seed << ": " << (r.mismatches.empty() ? "" : r.mismatches.front());
  }
}

TEST(Replay, DetectsTampering) {
  GameLog log = simulated(11);
  for (auto& rec : log.events) {
    if (auto* e = std::get_if<EliminationEvent>(&rec.payload)) {
      for (const auto& r : log.header.roster)
        if (r.id != e->player) {
          e->player = r.id;
          break;
        }
      break;
    }
  }
  EXPECT_FALSE(replay_log(log).eliminations_match);

  GameLog roles = simulated(12);
  std::swap(roles.header.roster[0].role, roles.header.roster[roles.header.roster.size() - 1].role);
  if (roles.header.roster[0].role != roles.header.roster.back().role) EXPECT_FALSE(replay_log(roles).roles_match);
}

TEST(Import, TextDumpDirectory) {
  TempDir dir;
  const fs::path g = dir.path / "games" / "0007";
  write_file(g / "player_names.txt", "Morgan\nRowan\nAshton\nGray\nJackie\n");
  write_file(g / "mafia_names.txt", "Morgan\nJackie\n");
  write_file(g / "config.json", R"({"players":[{"name":"Jackie","is_llm":true},{"name":"Morgan","is_llm":false}]})");
  write_file(g / "public_manager_chat.txt",
             "[21:54:26] Game-Manager: Now it's Daytime for 2 minutes, everyone can communicate and see messages and votes.\n"
             "[21:56:26] Game-Manager: Gray was voted out. Their role was bystander\n"
             "[21:56:27] Game-Manager: Now it's Nighttime for 1 minute, only mafia players can communicate and see each other's messages and votes.\n"
             "[21:57:27] Game-Manager: Now it's Daytime for 2 minutes, everyone can communicate and see messages and votes.\n");
  write_file(g / "public_daytime_chat.txt",
             "[21:54:36] Morgan: please call me stanley\n[21:54:36] Rowan: hello\n[21:54:41] Jackie: hi\n"
             "[21:57:30] Stranger: not on the roster\n[21:57:31] Ashton: a long\nmessage continues\n");
  write_file(g / "public_nighttime_chat.txt", "[21:56:40] Morgan: rowan?\n");
  write_file(g / "who_wins.txt", "Mafia won\n");

  const auto logs = import_external(dir.path, "textdump");
  ASSERT_EQ(logs.size(), 1u);
  const GameLog& log = logs[0];
  EXPECT_EQ(log.header.game_id, "0007");
  EXPECT_EQ(log.header.source, "import:textdump");
  ASSERT_EQ(log.header.roster.size(), 5u);
  EXPECT_EQ(log.header.roster[0].role, Role::Mafia);
  EXPECT_TRUE(log.header.roster[4].is_agent);
  EXPECT_EQ(log.outcome(), Outcome::MafiaWin);

  std::vector<std::pair<int, PhaseKind>> starts;
  int player_msgs = 0, eliminations = 0;
  std::string continued;
  for (const auto& r : log.events) {
    if (const auto* p = r.as<PhaseEvent>(); p && p->edge == PhaseEvent::Edge::Start) starts.emplace_back(p->phase_index, p->kind);
    if (const auto* m = r.as<MessageEvent>(); m && !m->message.from_game_manager()) {
      ++player_msgs;
      if (m->message.author_name == "Ashton") continued = m->message.content;
      if (m->message.author_name == "Morgan" && m->message.content == "rowan?")
        EXPECT_EQ(m->message.scope, Scope::NighttimeMafia);
    }
    if (const auto* e = r.as<EliminationEvent>()) {
      ++eliminations;
      EXPECT_EQ(e->player, log.header.roster[3].id);
    }
  }
  const std::vector<std::pair<int, PhaseKind>> expected{
      {1, PhaseKind::Daytime}, {1, PhaseKind::Nighttime}, {2, PhaseKind::Daytime}};
  EXPECT_EQ(starts, expected);
  EXPECT_EQ(player_msgs, 5);  // the unlisted speaker is skipped
  EXPECT_EQ(eliminations, 1);
  EXPECT_EQ(continued, "a long message continues");
  const auto lossy = log.header.config.at("import").at("lossy");
  EXPECT_NE(std::find(lossy.begin(), lossy.end(), "votes"), lossy.end());
}

TEST(Import, UnknownAdapterAndNativeDirectory) {
  TempDir dir;
  EXPECT_THROW(import_external(dir.path, "csv"), Error);
  const GameLog log = fixtures::synthetic_log(8);
  write_file(dir.path / "a.log", encode_log(log));
  const auto logs = import_external(dir.path, "native");
  ASSERT_EQ(logs.size(), 1u);
  EXPECT_EQ(logs[0].header.game_id, log.header.game_id);
}
