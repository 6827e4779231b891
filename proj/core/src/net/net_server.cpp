// SPDX-License-Identifier: Apache-2.0
#include "amafia/net/net_server.hpp"

#include <cctype>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "amafia/error.hpp"
#include "amafia/server/frames.hpp"

namespace amafia {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

http::status status_for(Errc code) {
  switch (code) {
    case Errc::UnknownGame: return http::status::not_found;
    case Errc::NoConsent:
    case Errc::NotPermitted: return http::status::forbidden;
    case Errc::LobbyFull:
    case Errc::LobbyClosed:
    case Errc::GameOngoing:
    case Errc::GameFinished:
    case Errc::SurveyClosed:
    case Errc::DuplicateSubmission:
    case Errc::PhaseStillOpen: return http::status::conflict;
    case Errc::InvalidConfig:
    case Errc::InvalidFrame:
    case Errc::InvalidTarget:
    case Errc::EmptyMessage:
    case Errc::UnknownPlayer:
    case Errc::TooFewPlayers:
    case Errc::TooManyPlayers:
    case Errc::NoCandidates: return http::status::bad_request;
    default: return http::status::internal_server_error;
  }
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out.push_back(' ');
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

http::status status_for_code(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(Errc::UnknownPlaceholder); ++c)
    if (to_string(static_cast<Errc>(c)) == name) return status_for(static_cast<Errc>(c));
  return http::status::internal_server_error;
}

struct Target {
  std::vector<std::string> segments;
  std::map<std::string, std::string> query;
};

Target parse_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  std::string_view path = target.substr(0, q);
  if (q != std::string_view::npos) {
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const std::string_view kv = rest.substr(0, amp);
      const auto eq = kv.find('=');
      t.query[url_decode(kv.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(kv.substr(eq + 1));
      rest = amp == std::string_view::npos ? std::string_view{} : rest.substr(amp + 1);
    }
  }
  while (!path.empty()) {
    const auto slash = path.find('/');
    if (slash != 0) t.segments.push_back(url_decode(path.substr(0, slash)));
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash + 1);
  }
  return t;
}

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

Response make_response(const Request& req, http::status status, std::string body, std::string_view type) {
  Response res{status, req.version()};
  res.set(http::field::server, "asyncmafia");
  res.set(http::field::content_type, std::string(type));
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_response(const Request& req, const nlohmann::json& body, http::status status = http::status::ok) {
  return make_response(req, status, body.dump(), "application/json");
}

std::string query_or(const Target& t, const std::string& key) {
  auto it = t.query.find(key);
  return it == t.query.end() ? "" : it->second;
}

// ---- WebSocket session ----

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::shared_ptr<GameSession> game, PlayerId who)
      : ws_(std::move(socket)), game_(std::move(game)), who_(std::move(who)) {}

  ~WsSession() {
    if (subscription_) game_->unsubscribe(*subscription_);
  }

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = weak_from_this();
    try {
      subscription_ = game_->subscribe(who_, [weak](const nlohmann::json& frame) {
        if (auto self = weak.lock()) self->enqueue(frame.dump());
      });
      enqueue(game_->client_view(who_).dump());
    } catch (const Error& e) {
      enqueue(error_frame(e.code(), e.what()).dump());
    }
    do_read();
  }

  void enqueue(std::string text) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->do_write();
    });
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->do_write();
    });
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        if (self->subscription_) self->game_->unsubscribe(*self->subscription_);
        self->subscription_.reset();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      std::optional<nlohmann::json> reply;
      try {
        reply = self->game_->handle_frame(self->who_, parse_client_frame(std::string_view(text)));
      } catch (const Error& e) {
        reply = error_frame(e.code(), e.what());
      }
      if (reply) self->enqueue(reply->dump());
      self->do_read();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<GameSession> game_;
  PlayerId who_;
  std::optional<std::uint64_t> subscription_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

// ---- HTTP session ----

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, GameServer& games, const NetOptions& options)
      : stream_(std::move(socket)), games_(games), options_(options) {}

  void run() {
    asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (websocket::is_upgrade(req_)) {
      upgrade();
      return;
    }
    Response res = route(req_);
    auto sp = std::make_shared<Response>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code wec, std::size_t) {
      if (!wec && sp->keep_alive()) {
        self->do_read();
      } else {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      }
    });
  }

  void upgrade() {
    const Target t = parse_target(std::string_view(req_.target().data(), req_.target().size()));
    std::optional<Response> refusal;
    std::shared_ptr<GameSession> game;
    std::optional<PlayerId> who;
    if (t.segments != std::vector<std::string>{"ws"}) {
      refusal = json_response(req_, error_frame(Errc::InvalidFrame, "websocket endpoint is /ws"), http::status::not_found);
    } else {
      try {
        game = games_.game(query_or(t, "game"));
        who = game->participant_for_token(query_or(t, "token"));
        if (!who)
          refusal = json_response(req_, error_frame(Errc::NotPermitted, "unknown session token"), http::status::unauthorized);
      } catch (const Error& e) {
        refusal = json_response(req_, error_frame(e.code(), e.what()), status_for(e.code()));
      }
    }
    if (refusal) {
      refusal->keep_alive(false);
      auto sp = std::make_shared<Response>(std::move(*refusal));
      http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      });
      return;
    }
    stream_.expires_never();
    std::make_shared<WsSession>(stream_.release_socket(), std::move(game), *who)->run(std::move(req_));
  }

  Response route(const Request& req) {
    const Target t = parse_target(std::string_view(req.target().data(), req.target().size()));
    const auto& s = t.segments;
    const auto method = req.method();
    try {
      if (!s.empty() && s[0] == "api") return api(req, t, method);
      if (method == http::verb::get) return static_file(req, s);
      return json_response(req, error_frame(Errc::InvalidFrame, "method not allowed"), http::status::method_not_allowed);
    } catch (const Error& e) {
      return json_response(req, error_frame(e.code(), e.what()), status_for(e.code()));
    } catch (const nlohmann::json::exception& e) {
      return json_response(req, error_frame(Errc::InvalidConfig, e.what()), http::status::bad_request);
    }
  }

  Response api(const Request& req, const Target& t, http::verb method) {
    const auto& s = t.segments;
    auto not_found = [&] {
      return json_response(req, error_frame(Errc::InvalidFrame, "no such endpoint"), http::status::not_found);
    };
    if (s.size() == 2 && s[1] == "consent" && method == http::verb::get) {
      std::string version = query_or(t, "version");
      if (version.empty()) version = "v1";
      return json_response(req, {{"version", version}, {"text", consent_text(version)}});
    }
    if (s.size() < 2 || s[1] != "games") return not_found();
    if (s.size() == 2) {
      if (method == http::verb::post) {
        const auto body = req.body().empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body());
        const std::string id = games_.create_game(game_config_from_json(body));
        return json_response(req, {{"game_id", id}}, http::status::created);
      }
      if (method == http::verb::get) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& id : games_.game_ids()) list.push_back(games_.game(id)->public_summary());
        return json_response(req, list);
      }
      return not_found();
    }

    auto game = games_.game(s[2]);
    if (s.size() == 3 && method == http::verb::get) return json_response(req, game->public_summary());
    if (s.size() != 4) return not_found();
    const std::string& action = s[3];
    const std::string token = query_or(t, "token");

    if (action == "join" && method == http::verb::post) {
      const auto body = nlohmann::json::parse(req.body().empty() ? "{}" : req.body());
      const auto r = game->join(body.value("participant_id", ""), body.value("consent", false));
      return json_response(req, {{"participant_id", r.participant.value},
                                 {"character_name", r.character_name},
                                 {"token", r.token},
                                 {"protocol_version", kProtocolVersion}});
    }
    if (action == "log" && method == http::verb::get) {
      return make_response(req, http::status::ok, game->export_log(games_.is_admin(token)), "application/x-ndjson");
    }
    if (action == "survey" && method == http::verb::get) {
      if (game->stage() != SessionStage::Finished && !games_.is_admin(token))
        throw Error(Errc::GameOngoing, "the survey is available once the game is over");
      nlohmann::json list = nlohmann::json::array();
      for (const auto& r : game->collect_survey()) {
        nlohmann::json j = {{"respondent", r.respondent.value},
                            {"identified_agent", r.identified_agent},
                            {"partial", r.partial}};
        if (r.guessed_agent) j["guessed_agent"] = *r.guessed_agent;
        if (r.human_similarity) j["human_similarity"] = *r.human_similarity;
        if (r.timing) j["timing"] = *r.timing;
        if (r.relevance) j["relevance"] = *r.relevance;
        list.push_back(std::move(j));
      }
      return json_response(req, list);
    }

    const auto who = game->participant_for_token(token);
    if (!who) return json_response(req, error_frame(Errc::NotPermitted, "unknown session token"), http::status::unauthorized);
    if (action == "state" && method == http::verb::get) return json_response(req, game->client_view(*who));
    if (action == "frames" && method == http::verb::post) {
      const auto reply = game->handle_frame(*who, parse_client_frame(std::string_view(req.body())));
      if (!reply) return json_response(req, {{"type", "ok"}});
      const bool failed = reply->value("type", "") == "error";
      return json_response(req, *reply,
                           failed ? status_for_code(reply->value("code", "")) : http::status::ok);
    }
    return not_found();
  }

  Response static_file(const Request& req, const std::vector<std::string>& segments) {
    auto missing = [&] { return make_response(req, http::status::not_found, "not found\n", "text/plain"); };
    if (!options_.static_dir) return missing();
    std::filesystem::path rel;
    for (const auto& seg : segments) {
      if (seg == ".." || seg == "." || seg.find('\\') != std::string::npos) return missing();
      rel /= seg;
    }
    if (rel.empty()) rel = "index.html";
    const auto path = *options_.static_dir / rel;
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path)) return missing();
    std::ostringstream ss;
    ss << in.rdbuf();
    return make_response(req, http::status::ok, ss.str(), mime_type(path));
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  Request req_;
  GameServer& games_;
  const NetOptions& options_;
};

}  // namespace

// ---- listener ----

struct NetServer::Impl {
  Impl(GameServer& g, NetOptions o) : games(g), options(std::move(o)), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        if (!acceptor.is_open()) return;
      } else {
        std::make_shared<HttpSession>(std::move(socket), games, options)->run();
      }
      accept();
    });
  }

  GameServer& games;
  NetOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  std::uint16_t port = 0;
};

NetServer::NetServer(GameServer& games, NetOptions options)
    : impl_(std::make_unique<Impl>(games, std::move(options))) {}

NetServer::~NetServer() { stop(); }

void NetServer::start() {
  auto& im = *impl_;
  beast::error_code ec;
  const tcp::endpoint ep{asio::ip::make_address(im.options.address, ec), im.options.port};
  if (ec) throw Error(Errc::IOFailure, "bad listen address " + im.options.address);
  im.acceptor.open(ep.protocol(), ec);
  if (!ec) im.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor.bind(ep, ec);
  if (!ec) im.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error(Errc::IOFailure, "cannot listen on " + im.options.address + ":" +
                                           std::to_string(im.options.port) + ": " + ec.message());
  im.port = im.acceptor.local_endpoint().port();
  im.accept();
  for (int i = 0; i < std::max(1, im.options.io_threads); ++i) im.threads.emplace_back([&im] { im.ioc.run(); });
  spdlog::info("listening on {}:{}", im.options.address, im.port);
}

void NetServer::stop() {
  auto& im = *impl_;
  if (im.threads.empty()) return;
  asio::post(im.ioc, [&im] {
    beast::error_code ignored;
    im.acceptor.close(ignored);
  });
  im.ioc.stop();
  for (auto& t : im.threads) t.join();
  im.threads.clear();
}

std::uint16_t NetServer::port() const { return impl_->port; }

}  // namespace amafia
