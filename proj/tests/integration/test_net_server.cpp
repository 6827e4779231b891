// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "amafia/archive/game_log.hpp"
#include "amafia/net/net_server.hpp"

using namespace amafia;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using nlohmann::json;

namespace {

// Blocking WebSocket client; every read is bounded by a timeout.
class WsClient {
 public:
  WsClient(std::uint16_t port, const std::string& target) : ws_(ioc_) {
    asio::ip::tcp::resolver resolver(ioc_);
    beast::get_lowest_layer(ws_).connect(resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", target);
  }

  std::optional<json> next(std::chrono::milliseconds timeout = std::chrono::milliseconds{3000}) {
    std::optional<json> out;
    bool done = false;
    ws_.async_read(buffer_, [&](beast::error_code ec, std::size_t) {
      done = true;
      if (!ec) out = json::parse(beast::buffers_to_string(buffer_.data()));
      buffer_.consume(buffer_.size());
    });
    ioc_.restart();
    ioc_.run_for(timeout);
    if (!done) {
      beast::get_lowest_layer(ws_).cancel();
      ioc_.restart();
      ioc_.run();
    }
    return out;
  }

  // Reads until a frame satisfies `stop`; returns everything read, inclusive.
  std::vector<json> until(const std::function<bool(const json&)>& stop) {
    std::vector<json> frames;
    while (auto f = next()) {
      frames.push_back(*f);
      if (stop(*f)) return frames;
    }
    ADD_FAILURE() << "stream ended before the expected frame";
    return frames;
  }

  void send(const json& frame) { ws_.write(asio::buffer(frame.dump())); }

 private:
  asio::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
};

struct Fixture {
  Fixture() : games(clock, nullptr, ServerOptions{{}, "admin-token", false}) {
    static_dir = std::filesystem::temp_directory_path() /
                 ("amafia-web-" + std::to_string(::getpid()) + "-" +
                  ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(static_dir);
    std::ofstream(static_dir / "index.html") << "<!doctype html><title>lobby</title>";
    std::ofstream(static_dir / "app.js") << "console.log('hi');";
    net = std::make_unique<NetServer>(games, NetOptions{"127.0.0.1", 0, static_dir, 1});
    net->start();
    http = std::make_unique<httplib::Client>("127.0.0.1", net->port());
  }
  ~Fixture() {
    net->stop();
    std::filesystem::remove_all(static_dir);
  }

  json post(const std::string& path, const json& body, int expect = 200) {
    auto res = http->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }
  json get(const std::string& path, int expect = 200) {
    auto res = http->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  struct Seat {
    std::string id, name, token;
  };

  // Creates an eight-seat human game and fills it.
  std::string full_game(std::uint64_t seed) {
    const std::string id =
        post("/api/games", {{"roster_size", 8}, {"agent_count", 0}, {"rng_seed", seed}}, 201).at("game_id");
    for (int i = 0; i < 8; ++i) {
      const auto r = post("/api/games/" + id + "/join", {{"participant_id", "u" + std::to_string(i)}, {"consent", true}});
      seats.push_back({r.at("participant_id"), r.at("character_name"), r.at("token")});
    }
    return id;
  }

  VirtualClock clock;
  GameServer games;
  std::filesystem::path static_dir;
  std::unique_ptr<NetServer> net;
  std::unique_ptr<httplib::Client> http;
  std::vector<Seat> seats;
};

}  // namespace

TEST(NetServer, LobbyAndRestFlow) {
  Fixture f;
  const auto consent = f.get("/api/consent");
  EXPECT_EQ(consent.at("version"), "v1");
  EXPECT_FALSE(consent.at("text").get<std::string>().empty());

  EXPECT_EQ(f.post("/api/games", {{"roster_size", 3}}, 400).at("code"), "InvalidConfig");
  EXPECT_EQ(f.post("/api/games", {{"bogus", 1}}, 400).at("code"), "InvalidConfig");
  const std::string id = f.post("/api/games", {{"roster_size", 8}, {"agent_count", 0}}, 201).at("game_id");
  EXPECT_EQ(f.get("/api/games/" + id).at("stage"), "lobby");
  EXPECT_EQ(f.get("/api/games").size(), 1u);
  EXPECT_EQ(f.get("/api/games/nope", 404).at("code"), "UnknownGame");

  EXPECT_EQ(f.post("/api/games/" + id + "/join", {{"participant_id", "u0"}, {"consent", false}}, 403).at("code"),
            "NoConsent");
  std::vector<std::string> tokens;
  for (int i = 0; i < 8; ++i)
    tokens.push_back(
        f.post("/api/games/" + id + "/join", {{"participant_id", "u" + std::to_string(i)}, {"consent", true}})
            .at("token"));
  EXPECT_EQ(f.post("/api/games/" + id + "/join", {{"participant_id", "late"}, {"consent", true}}, 409).at("code"),
            "LobbyClosed");

  EXPECT_EQ(f.get("/api/games/" + id + "/state?token=wrong", 401).at("code"), "NotPermitted");
  const auto state = f.get("/api/games/" + id + "/state?token=" + tokens[0]);
  EXPECT_EQ(state.at("stage"), "running");
  EXPECT_EQ(state.at("phase").at("kind"), "Daytime");
  EXPECT_EQ(state.at("protocol"), kProtocolVersion);

  const std::string frames = "/api/games/" + id + "/frames?token=" + tokens[0];
  EXPECT_EQ(f.post(frames, {{"type", "send_message"}, {"content", "hello table"}}).at("type"), "ok");
  EXPECT_EQ(f.post(frames, {{"type", "send_message"}}, 400).at("code"), "InvalidFrame");
  EXPECT_EQ(f.post(frames, {{"type", "cast_vote"}, {"target", "Nobody"}}, 400).at("code"), "InvalidTarget");
  EXPECT_EQ(f.post(frames, {{"type", "survey_submit"}, {"stage", "guess"}, {"guess", "x"}}, 409).at("code"),
            "GameOngoing");

  auto res = f.http->Get("/api/games/" + id + "/log");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  res = f.http->Get("/api/games/" + id + "/log?token=admin-token");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const GameLog log = parse_log(res->body, ReadOptions{false});
  EXPECT_EQ(log.header.roster.size(), 8u);

  const auto after = f.get("/api/games/" + id + "/state?token=" + tokens[1]);
  ASSERT_EQ(after.at("messages").back().at("content"), "hello table");
}

TEST(NetServer, StaticAssets) {
  Fixture f;
  auto res = f.http->Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("lobby"), std::string::npos);
  EXPECT_NE(res->get_header_value("Content-Type").find("text/html"), std::string::npos);
  res = f.http->Get("/app.js");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->get_header_value("Content-Type").find("javascript"), std::string::npos);
  res = f.http->Get("/missing.css");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = f.http->Get("/../etc/passwd");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST(NetServer, WebSocketRejectsUnknownToken) {
  Fixture f;
  const std::string id = f.full_game(1);
  EXPECT_ANY_THROW(WsClient(f.net->port(), "/ws?game=" + id + "&token=bad"));
  EXPECT_ANY_THROW(WsClient(f.net->port(), "/ws?game=missing&token=" + f.seats[0].token));
}

// A mafia and a bystander client through a day and a night. The resync
// snapshot equals the state pushed on connect, and the bystander receives no
// frame that carries night-time mafia activity.
TEST(NetServer, WebSocketFramesAndNightSecrecy) {
  Fixture f;
  const std::string id = f.full_game(7);
  const auto session = f.games.game(id);
  const auto st = session->state_copy();
  auto seat_of = [&](const PlayerId& pid) {
    for (const auto& s : f.seats)
      if (s.id == pid.value) return s;
    return Fixture::Seat{};
  };
  std::vector<Fixture::Seat> mafia, town;
  for (const auto& p : st.players) (p.role == Role::Mafia ? mafia : town).push_back(seat_of(p.id));
  ASSERT_EQ(mafia.size(), 2u);

  WsClient boss(f.net->port(), "/ws?game=" + id + "&token=" + mafia[0].token);
  WsClient watcher(f.net->port(), "/ws?game=" + id + "&token=" + town[0].token);

  for (WsClient* c : {&boss, &watcher}) {
    const auto packet = c->next();
    ASSERT_TRUE(packet);
    EXPECT_EQ(packet->at("type"), "role_packet");
  }
  const auto pushed = watcher.next();
  ASSERT_TRUE(pushed);
  EXPECT_EQ(pushed->at("type"), "state");
  EXPECT_EQ(*pushed, f.get("/api/games/" + id + "/state?token=" + town[0].token));
  EXPECT_FALSE(pushed->at("me").contains("teammates"));
  const auto boss_state = boss.next();
  ASSERT_TRUE(boss_state);
  EXPECT_EQ(boss_state->at("me").at("teammates").size(), 2u);

  watcher.send({{"type", "send_message"}, {"content", "morning all"}});
  for (WsClient* c : {&boss, &watcher}) {
    const auto m = c->next();
    ASSERT_TRUE(m);
    EXPECT_EQ(m->at("type"), "message");
    EXPECT_EQ(m->at("content"), "morning all");
    EXPECT_EQ(m->at("author"), town[0].name);
  }
  watcher.send({{"type", "send_message"}, {"content", ""}});
  const auto err = watcher.next();
  ASSERT_TRUE(err);
  EXPECT_EQ(err->at("type"), "error");
  EXPECT_EQ(err->at("code"), "EmptyMessage");

  // Day: everyone votes out town[1] over REST; both sockets see the votes.
  for (const auto& s : f.seats)
    if (s.id != town[1].id)
      f.post("/api/games/" + id + "/frames?token=" + s.token, {{"type", "cast_vote"}, {"target", town[1].name}});
  boss.until([](const json& j) { return j.at("type") == "vote_update" && j.at("counts").begin().value() == 7; });
  watcher.until([](const json& j) { return j.at("type") == "vote_update" && j.at("counts").begin().value() == 7; });

  ASSERT_TRUE(f.clock.advance_to_next());
  auto is_night_start = [](const json& j) {
    return j.at("type") == "phase_event" && j.at("edge") == "start" && j.at("kind") == "Nighttime";
  };
  const auto dusk = watcher.until(is_night_start);
  bool voted_out = false;
  for (const auto& j : dusk)
    if (j.at("type") == "message" && j.at("content") == town[1].name + " was voted out.") voted_out = true;
  EXPECT_TRUE(voted_out);
  boss.until(is_night_start);

  // Night: the mafia talk and vote for town[2].
  boss.send({{"type", "send_message"}, {"content", "go for " + town[2].name}});
  const auto plan = boss.next();
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->at("scope"), "NighttimeMafia");
  for (const auto& m : mafia)
    f.post("/api/games/" + id + "/frames?token=" + m.token, {{"type", "cast_vote"}, {"target", town[2].name}});
  watcher.send({{"type", "send_message"}, {"content", "can anyone hear me"}});
  const auto refused = watcher.next();
  ASSERT_TRUE(refused);
  EXPECT_EQ(refused->at("code"), "NotPermitted");

  ASSERT_TRUE(f.clock.advance_to_next());
  auto is_day_start = [](const json& j) {
    return j.at("type") == "phase_event" && j.at("edge") == "start" && j.at("kind") == "Daytime";
  };
  const auto night = watcher.until(is_day_start);
  bool saw_kill = false;
  for (const auto& j : night) {
    EXPECT_NE(j.value("scope", ""), "NighttimeMafia") << j.dump();
    EXPECT_NE(j.at("type"), "vote_update") << j.dump();
    if (j.at("type") == "phase_event" && j.at("edge") == "end") EXPECT_FALSE(j.contains("eliminated"));
    if (j.at("type") == "message" && j.at("content") == town[2].name + " was killed by the mafia last night.")
      saw_kill = true;
  }
  EXPECT_TRUE(saw_kill);

  const auto boss_night = boss.until(is_day_start);
  bool boss_saw_votes = false;
  for (const auto& j : boss_night) boss_saw_votes |= j.at("type") == "vote_update";
  EXPECT_TRUE(boss_saw_votes);

  // Resync after the night matches a fresh connection's pushed state.
  WsClient late(f.net->port(), "/ws?game=" + id + "&token=" + town[0].token);
  ASSERT_TRUE(late.next());  // role packet
  const auto fresh = late.next();
  ASSERT_TRUE(fresh);
  const auto resync = f.get("/api/games/" + id + "/state?token=" + town[0].token);
  EXPECT_EQ(*fresh, resync);
  for (const auto& m : resync.at("messages")) EXPECT_NE(m.at("scope"), "NighttimeMafia");
}
