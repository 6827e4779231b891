// SPDX-License-Identifier: Apache-2.0
#include "amafia/archive/game_log.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "amafia/error.hpp"

namespace amafia {

using nlohmann::json;

std::string_view event_type(const EventPayload& payload) {
  struct Visitor {
    std::string_view operator()(const MessageEvent&) const { return "message"; }
    std::string_view operator()(const VoteEvent&) const { return "vote"; }
    std::string_view operator()(const PhaseEvent&) const { return "phase_event"; }
    std::string_view operator()(const EliminationEvent&) const { return "elimination"; }
    std::string_view operator()(const AgentDecisionEvent&) const { return "agent_decision"; }
    std::string_view operator()(const AgentVoteEvent&) const { return "agent_vote"; }
    std::string_view operator()(const RevealEvent&) const { return "reveal"; }
    std::string_view operator()(const SurveyEvent&) const { return "survey"; }
    std::string_view operator()(const OutcomeEvent&) const { return "outcome"; }
    std::string_view operator()(const UnknownEvent& u) const { return u.type; }
  };
  return std::visit(Visitor{}, payload);
}

std::optional<Outcome> GameLog::outcome() const {
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    if (const auto* o = it->as<OutcomeEvent>()) return o->outcome;
  return std::nullopt;
}

const RosterEntry* GameLog::roster_entry(const PlayerId& id) const {
  for (const auto& r : header.roster)
    if (r.id == id) return &r;
  return nullptr;
}

const RosterEntry* GameLog::agent() const {
  for (const auto& r : header.roster)
    if (r.is_agent) return &r;
  return nullptr;
}

// ---- encoding ----

namespace {

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

void put_opt_time(json& j, const char* key, const std::optional<TimePoint>& v) {
  if (v) j[key] = to_millis(*v);
}

json encode_prompt(const PromptBundle& p) {
  return {{"system", p.system_text},
          {"user", p.user_text},
          {"variant", to_string(p.variant)},
          {"snapshot_seq", p.snapshot_seq},
          {"rendered_at", to_millis(p.rendered_at)}};
}

json encode_payload(const EventPayload& payload) {
  struct Visitor {
    json operator()(const MessageEvent& e) const {
      const auto& m = e.message;
      return {{"seq", m.seq},          {"sent_at", to_millis(m.timestamp)}, {"author", m.author.value},
              {"author_name", m.author_name}, {"content", m.content},      {"scope", to_string(m.scope)},
              {"phase_index", m.phase_index}};
    }
    json operator()(const VoteEvent& e) const {
      const auto& v = e.vote;
      return {{"voter", v.voter.value},
              {"target", v.target.value},
              {"phase_index", v.phase_index},
              {"kind", to_string(v.kind)},
              {"cast_at", to_millis(v.timestamp)}};
    }
    json operator()(const PhaseEvent& e) const {
      json j = {{"edge", e.edge == PhaseEvent::Edge::Start ? "start" : "end"},
                {"phase_index", e.phase_index},
                {"kind", to_string(e.kind)},
                {"duration_ms", e.duration.count()}};
      if (e.revealed_victim) j["revealed_victim"] = e.revealed_victim->value;
      return j;
    }
    json operator()(const EliminationEvent& e) const {
      return {{"player", e.player.value},
              {"phase_index", e.phase_index},
              {"kind", to_string(e.kind)},
              {"announced", e.announced}};
    }
    json operator()(const AgentDecisionEvent& e) const {
      const auto& r = e.record;
      json j = {{"agent", e.agent.value},
                {"iteration", r.iteration},
                {"phase_index", r.phase_index},
                {"phase_kind", to_string(r.phase_kind)},
                {"snapshot_seq", r.snapshot_seq},
                {"n_active", r.n_active},
                {"agent_msgs", r.agent_msgs},
                {"others_msgs", r.others_msgs},
                {"rate", r.rate},
                {"variant", to_string(r.variant_used)},
                {"raw_scheduler_output", r.raw_scheduler_output},
                {"decision", to_string(r.decision)},
                {"malformed", r.malformed},
                {"llm_unavailable", r.llm_unavailable},
                {"dropped", r.dropped},
                {"typing_delay_ms", r.typing_delay.count()},
                {"latency_ms", {{"scheduler", r.latencies.scheduler.count()},
                                {"generator", r.latencies.generator.count()}}},
                {"started_at", to_millis(r.started_at)},
                {"scheduler_prompt", encode_prompt(r.scheduler_prompt)},
                {"scheduler_request_hash", r.scheduler_request_hash},
                {"generator_request_hash", r.generator_request_hash}};
      put_opt(j, "raw_generator_output", r.raw_generator_output);
      put_opt(j, "generated_text", r.generated_text);
      put_opt(j, "published_seq", r.published_seq);
      put_opt_time(j, "generation_completed_at", r.generation_completed_at);
      put_opt_time(j, "published_at", r.published_at);
      if (r.generator_prompt) j["generator_prompt"] = encode_prompt(*r.generator_prompt);
      return j;
    }
    json operator()(const AgentVoteEvent& e) const {
      const auto& r = e.record;
      return {{"agent", e.agent.value},
              {"phase_index", r.phase_index},
              {"phase_kind", to_string(r.phase_kind)},
              {"at", to_millis(r.at)},
              {"candidates", r.candidates},
              {"prompt", encode_prompt(r.prompt)},
              {"raw_reply", r.raw_reply},
              {"target", r.target},
              {"fallback", r.fallback},
              {"llm_unavailable", r.llm_unavailable},
              {"accepted", r.accepted}};
    }
    json operator()(const RevealEvent& e) const { return {{"agent_names", e.agent_names}}; }
    json operator()(const SurveyEvent& e) const {
      const auto& s = e.response;
      json j = {{"respondent", s.respondent.value},
                {"identified_agent", s.identified_agent},
                {"partial", s.partial}};
      put_opt(j, "guessed_agent", s.guessed_agent);
      put_opt_time(j, "guessed_at", s.guessed_at);
      put_opt(j, "human_similarity", s.human_similarity);
      put_opt(j, "timing", s.timing);
      put_opt(j, "relevance", s.relevance);
      put_opt_time(j, "scored_at", s.scored_at);
      return j;
    }
    json operator()(const OutcomeEvent& e) const {
      return {{"outcome", to_string(e.outcome)}, {"rounds", e.rounds}};
    }
    json operator()(const UnknownEvent& e) const { return e.data; }
  };
  return std::visit(Visitor{}, payload);
}

json encode_header_data(const LogHeader& h) {
  json roster = json::array();
  for (const auto& r : h.roster)
    roster.push_back({{"id", r.id.value}, {"name", r.character_name}, {"role", to_string(r.role)},
                      {"is_agent", r.is_agent}});
  return {{"schema_version", h.schema_version},
          {"game_id", h.game_id},
          {"source", h.source},
          {"started_at", to_millis(h.started_at)},
          {"rules",
           {{"day_ms", h.rules.day_duration.count()},
            {"night_ms", h.rules.night_duration.count()},
            {"max_rounds", h.rules.max_rounds},
            {"seed", h.rules.rng_seed}}},
          {"roster", roster},
          {"config", h.config}};
}

void merge_missing(json& into, const json& extra) {
  if (!extra.is_object()) return;
  for (auto it = extra.begin(); it != extra.end(); ++it)
    if (!into.contains(it.key())) into[it.key()] = it.value();
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

std::string encode_header_line(const GameLog& log) {
  json data = encode_header_data(log.header);
  merge_missing(data, log.header_extra_data);
  json line = {{"type", "header"}, {"seq", 0}, {"ts", to_millis(log.header.started_at)}, {"data", data}};
  merge_missing(line, log.header_extra_fields);
  return dump_line(line);
}

std::string encode_record_line(const LogRecord& record) {
  json data = encode_payload(record.payload);
  merge_missing(data, record.extra_data);
  json line = {{"type", event_type(record.payload)}, {"seq", record.seq}, {"ts", to_millis(record.ts)},
               {"data", data}};
  merge_missing(line, record.extra_fields);
  return dump_line(line);
}

std::string encode_log(const GameLog& log) {
  std::string out = encode_header_line(log);
  out.push_back('\n');
  for (const auto& r : log.events) {
    out += encode_record_line(r);
    out.push_back('\n');
  }
  return out;
}

std::string log_file_name(TimePoint started_at, std::string_view game_id) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(
      std::chrono::time_point_cast<std::chrono::seconds>(started_at));
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  std::string name = buf;
  name.push_back('_');
  for (char c : game_id)
    name.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '-');
  name += ".log";
  return name;
}

// ---- decoding ----

namespace {

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(Errc::SchemaViolation, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key) {
  return field(j, key).get<T>();
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

TimePoint get_time(const json& j, const char* key) { return from_millis(get<std::int64_t>(j, key)); }

std::optional<TimePoint> get_opt_time(const json& j, const char* key) {
  auto v = get_opt<std::int64_t>(j, key);
  if (!v) return std::nullopt;
  return from_millis(*v);
}

PromptBundle decode_prompt(const json& j) {
  PromptBundle p;
  p.system_text = get<std::string>(j, "system");
  p.user_text = get<std::string>(j, "user");
  p.variant = parse_prompt_variant(get<std::string>(j, "variant"));
  p.snapshot_seq = get<Seq>(j, "snapshot_seq");
  p.rendered_at = get_time(j, "rendered_at");
  return p;
}

Decision parse_decision(std::string_view s) {
  if (s == "send") return Decision::Send;
  if (s == "wait") return Decision::Wait;
  throw Error(Errc::SchemaViolation, "unknown decision '" + std::string(s) + "'");
}

EventPayload decode_payload(const std::string& type, const json& d) {
  if (type == "message") {
    ChatMessage m;
    m.seq = get<Seq>(d, "seq");
    m.timestamp = get_time(d, "sent_at");
    m.author = PlayerId(get<std::string>(d, "author"));
    m.author_name = get<std::string>(d, "author_name");
    m.content = get<std::string>(d, "content");
    m.scope = parse_scope(get<std::string>(d, "scope"));
    m.phase_index = get<int>(d, "phase_index");
    return MessageEvent{std::move(m)};
  }
  if (type == "vote") {
    Vote v;
    v.voter = PlayerId(get<std::string>(d, "voter"));
    v.target = PlayerId(get<std::string>(d, "target"));
    v.phase_index = get<int>(d, "phase_index");
    v.kind = parse_phase_kind(get<std::string>(d, "kind"));
    v.timestamp = get_time(d, "cast_at");
    return VoteEvent{std::move(v)};
  }
  if (type == "phase_event") {
    PhaseEvent e;
    const auto edge = get<std::string>(d, "edge");
    if (edge != "start" && edge != "end") throw Error(Errc::SchemaViolation, "unknown phase edge '" + edge + "'");
    e.edge = edge == "start" ? PhaseEvent::Edge::Start : PhaseEvent::Edge::End;
    e.phase_index = get<int>(d, "phase_index");
    e.kind = parse_phase_kind(get<std::string>(d, "kind"));
    e.duration = Duration{get<std::int64_t>(d, "duration_ms")};
    if (auto v = get_opt<std::string>(d, "revealed_victim")) e.revealed_victim = PlayerId(*v);
    return e;
  }
  if (type == "elimination") {
    EliminationEvent e;
    e.player = PlayerId(get<std::string>(d, "player"));
    e.phase_index = get<int>(d, "phase_index");
    e.kind = parse_phase_kind(get<std::string>(d, "kind"));
    e.announced = get<bool>(d, "announced");
    return e;
  }
  if (type == "agent_decision") {
    AgentDecisionEvent e;
    e.agent = PlayerId(get<std::string>(d, "agent"));
    auto& r = e.record;
    r.iteration = get<std::int64_t>(d, "iteration");
    r.phase_index = get<int>(d, "phase_index");
    r.phase_kind = parse_phase_kind(get<std::string>(d, "phase_kind"));
    r.snapshot_seq = get<Seq>(d, "snapshot_seq");
    r.n_active = get<int>(d, "n_active");
    r.agent_msgs = get<int>(d, "agent_msgs");
    r.others_msgs = get<int>(d, "others_msgs");
    r.rate = get<double>(d, "rate");
    r.variant_used = parse_prompt_variant(get<std::string>(d, "variant"));
    r.raw_scheduler_output = get<std::string>(d, "raw_scheduler_output");
    r.decision = parse_decision(get<std::string>(d, "decision"));
    r.malformed = get<bool>(d, "malformed");
    r.llm_unavailable = get<bool>(d, "llm_unavailable");
    r.dropped = get<bool>(d, "dropped");
    r.raw_generator_output = get_opt<std::string>(d, "raw_generator_output");
    r.generated_text = get_opt<std::string>(d, "generated_text");
    r.typing_delay = Duration{get<std::int64_t>(d, "typing_delay_ms")};
    r.published_seq = get_opt<Seq>(d, "published_seq");
    const auto& lat = field(d, "latency_ms");
    r.latencies.scheduler = Duration{get<std::int64_t>(lat, "scheduler")};
    r.latencies.generator = Duration{get<std::int64_t>(lat, "generator")};
    r.started_at = get_time(d, "started_at");
    r.generation_completed_at = get_opt_time(d, "generation_completed_at");
    r.published_at = get_opt_time(d, "published_at");
    r.scheduler_prompt = decode_prompt(field(d, "scheduler_prompt"));
    if (auto it = d.find("generator_prompt"); it != d.end() && !it->is_null())
      r.generator_prompt = decode_prompt(*it);
    r.scheduler_request_hash = get<std::string>(d, "scheduler_request_hash");
    r.generator_request_hash = get<std::string>(d, "generator_request_hash");
    return e;
  }
  if (type == "agent_vote") {
    AgentVoteEvent e;
    e.agent = PlayerId(get<std::string>(d, "agent"));
    auto& r = e.record;
    r.phase_index = get<int>(d, "phase_index");
    r.phase_kind = parse_phase_kind(get<std::string>(d, "phase_kind"));
    r.at = get_time(d, "at");
    r.candidates = get<std::vector<std::string>>(d, "candidates");
    r.prompt = decode_prompt(field(d, "prompt"));
    r.raw_reply = get<std::string>(d, "raw_reply");
    r.target = get<std::string>(d, "target");
    r.fallback = get<bool>(d, "fallback");
    r.llm_unavailable = get<bool>(d, "llm_unavailable");
    r.accepted = get<bool>(d, "accepted");
    return e;
  }
  if (type == "reveal") return RevealEvent{get<std::vector<std::string>>(d, "agent_names")};
  if (type == "survey") {
    SurveyResponse s;
    s.respondent = PlayerId(get<std::string>(d, "respondent"));
    s.guessed_agent = get_opt<std::string>(d, "guessed_agent");
    s.guessed_at = get_opt_time(d, "guessed_at");
    s.human_similarity = get_opt<int>(d, "human_similarity");
    s.timing = get_opt<int>(d, "timing");
    s.relevance = get_opt<int>(d, "relevance");
    s.scored_at = get_opt_time(d, "scored_at");
    s.identified_agent = get<bool>(d, "identified_agent");
    s.partial = get<bool>(d, "partial");
    return SurveyEvent{std::move(s)};
  }
  if (type == "outcome") {
    OutcomeEvent o;
    o.outcome = parse_outcome(get<std::string>(d, "outcome"));
    o.rounds = get<int>(d, "rounds");
    return o;
  }
  if (type == "header") throw Error(Errc::SchemaViolation, "second header record");
  return UnknownEvent{type, d};
}

LogHeader decode_header(const json& d) {
  LogHeader h;
  h.schema_version = get<std::string>(d, "schema_version");
  if (h.schema_version.substr(0, h.schema_version.find('.')) !=
      kLogSchemaVersion.substr(0, kLogSchemaVersion.find('.')))
    throw Error(Errc::SchemaViolation, "unsupported schema version " + h.schema_version);
  h.game_id = get<std::string>(d, "game_id");
  h.source = get<std::string>(d, "source");
  h.started_at = get_time(d, "started_at");
  const auto& rules = field(d, "rules");
  h.rules.day_duration = Duration{get<std::int64_t>(rules, "day_ms")};
  h.rules.night_duration = Duration{get<std::int64_t>(rules, "night_ms")};
  h.rules.max_rounds = get<int>(rules, "max_rounds");
  h.rules.rng_seed = get<std::uint64_t>(rules, "seed");
  for (const auto& r : field(d, "roster")) {
    RosterEntry e;
    e.id = PlayerId(get<std::string>(r, "id"));
    e.character_name = get<std::string>(r, "name");
    e.role = parse_role(get<std::string>(r, "role"));
    e.is_agent = get<bool>(r, "is_agent");
    h.roster.push_back(std::move(e));
  }
  h.config = d.value("config", json::object());
  return h;
}

json unknown_keys(const json& raw, const json& known) {
  json extra = json::object();
  for (auto it = raw.begin(); it != raw.end(); ++it)
    if (!known.contains(it.key())) extra[it.key()] = it.value();
  return extra;
}

json top_level_extra(const json& line) {
  json extra = json::object();
  for (auto it = line.begin(); it != line.end(); ++it)
    if (it.key() != "type" && it.key() != "seq" && it.key() != "ts" && it.key() != "data")
      extra[it.key()] = it.value();
  return extra;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({number, line});
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  // Blank lines carry no record.
  std::erase_if(lines, [](const Line& l) { return l.text.find_first_not_of(" \t") == std::string_view::npos; });
  return lines;
}

void validate(const GameLog& log, const ReadOptions& options, const std::vector<std::size_t>& line_of) {
  std::map<Seq, std::size_t> agent_message_lines;  // chat seq -> line
  std::map<Seq, bool> paired;
  int outcomes = 0;
  std::size_t last_line = line_of.empty() ? 1 : line_of.back();
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& r = log.events[i];
    const std::size_t line = line_of[i];
    if (i > 0) {
      const auto& prev = log.events[i - 1];
      if (r.seq <= prev.seq) throw SchemaError(line, "seq not strictly increasing");
      if (r.ts < prev.ts) throw SchemaError(line, "timestamp goes backwards");
    } else if (r.seq <= 0) {
      throw SchemaError(line, "event seq must be positive");
    }
    if (r.ts < log.header.started_at) throw SchemaError(line, "event precedes the header timestamp");

    auto known_player = [&](const PlayerId& id) { return log.roster_entry(id) != nullptr; };
    if (const auto* m = r.as<MessageEvent>()) {
      if (!m->message.from_game_manager()) {
        const auto* who = log.roster_entry(m->message.author);
        if (!who) throw SchemaError(line, "message from unknown player " + m->message.author.value);
        if (who->is_agent) {
          agent_message_lines[m->message.seq] = line;
          paired.emplace(m->message.seq, false);
        }
      }
    } else if (const auto* v = r.as<VoteEvent>()) {
      if (!known_player(v->vote.voter) || !known_player(v->vote.target))
        throw SchemaError(line, "vote references an unknown player");
    } else if (const auto* e = r.as<EliminationEvent>()) {
      if (!known_player(e->player)) throw SchemaError(line, "elimination of unknown player " + e->player.value);
    } else if (const auto* d = r.as<AgentDecisionEvent>()) {
      const auto* who = log.roster_entry(d->agent);
      if (!who || !who->is_agent) throw SchemaError(line, "agent_decision for a non-agent seat");
      if (d->record.published_seq) {
        if (d->record.decision != Decision::Send) throw SchemaError(line, "published message without a send decision");
        auto it = paired.find(*d->record.published_seq);
        if (it == paired.end()) throw SchemaError(line, "agent_decision points at a missing message");
        it->second = true;
      }
    } else if (r.as<OutcomeEvent>()) {
      if (++outcomes > 1) throw SchemaError(line, "more than one outcome record");
    }
  }
  for (const auto& [seq, ok] : paired)
    if (!ok) throw SchemaError(agent_message_lines[seq], "agent message without a matching send decision");
  if (options.require_outcome && outcomes == 0) throw SchemaError(last_line, "log has no outcome record");
}

}  // namespace

GameLog parse_log(std::string_view text, const ReadOptions& options) {
  GameLog log;
  auto lines = split_lines(text);
  if (lines.empty()) throw SchemaError(1, "empty log");

  std::vector<std::size_t> line_of;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const bool last = i + 1 == lines.size();
    json j;
    try {
      j = json::parse(l.text);
    } catch (const json::parse_error& e) {
      if (last && i > 0) {
        log.warnings.push_back("line " + std::to_string(l.number) + ": torn final line dropped");
        spdlog::warn("log line {}: torn final line dropped", l.number);
        break;
      }
      throw SchemaError(l.number, std::string("invalid JSON: ") + e.what());
    }
    try {
      if (!j.is_object()) throw Error(Errc::SchemaViolation, "record is not an object");
      const auto type = get<std::string>(j, "type");
      const auto& data = field(j, "data");
      if (!data.is_object()) throw Error(Errc::SchemaViolation, "data is not an object");
      if (i == 0) {
        if (type != "header") throw Error(Errc::SchemaViolation, "first record must be the header");
        if (get<std::int64_t>(j, "seq") != 0) throw Error(Errc::SchemaViolation, "header seq must be 0");
        log.header = decode_header(data);
        log.header_extra_fields = top_level_extra(j);
        log.header_extra_data = unknown_keys(data, encode_header_data(log.header));
        continue;
      }
      LogRecord r;
      r.seq = get<std::int64_t>(j, "seq");
      r.ts = from_millis(get<std::int64_t>(j, "ts"));
      r.payload = decode_payload(type, data);
      r.extra_fields = top_level_extra(j);
      if (!r.as<UnknownEvent>()) r.extra_data = unknown_keys(data, encode_payload(r.payload));
      log.events.push_back(std::move(r));
      line_of.push_back(l.number);
    } catch (const SchemaError&) {
      throw;
    } catch (const std::exception& e) {
      throw SchemaError(l.number, e.what());
    }
  }
  validate(log, options, line_of);
  return log;
}

GameLog read_log(const std::filesystem::path& path, const ReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IOFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_log(ss.str(), options);
  } catch (const SchemaError& e) {
    throw SchemaError(e.line(), path.filename().string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> list_logs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(Errc::IOFailure, dir.string() + " is not a directory");
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".log") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

// ---- writer ----

ArchiveWriter::ArchiveWriter(std::filesystem::path path) : path_(std::move(path)) {
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  out_ = std::make_unique<std::ofstream>(*path_, std::ios::binary | std::ios::trunc);
  if (!*out_) throw Error(Errc::IOFailure, "cannot open " + path_->string() + " for writing");
}

void ArchiveWriter::emit(const std::string& line) {
  if (!out_) return;
  *out_ << line << '\n';
  out_->flush();
  if (!*out_) throw Error(Errc::IOFailure, "write to " + path_->string() + " failed");
}

void ArchiveWriter::write_header(const LogHeader& header) {
  if (header_written_) throw Error(Errc::SchemaViolation, "header already written");
  log_.header = header;
  header_written_ = true;
  last_ts_ = header.started_at;
  emit(encode_header_line(log_));
}

const LogRecord& ArchiveWriter::write_event(TimePoint ts, EventPayload payload) {
  if (!header_written_) throw Error(Errc::HeaderMissing, "event written before the header");
  if (std::holds_alternative<OutcomeEvent>(payload)) {
    if (outcome_written_) throw Error(Errc::GameFinished, "outcome already written");
    outcome_written_ = true;
  }
  LogRecord r;
  r.seq = next_seq_++;
  r.ts = std::max(ts, last_ts_);
  last_ts_ = r.ts;
  r.payload = std::move(payload);
  emit(encode_record_line(r));
  log_.events.push_back(std::move(r));
  return log_.events.back();
}

const LogRecord& ArchiveWriter::write_outcome(TimePoint ts, OutcomeEvent outcome) {
  return write_event(ts, outcome);
}

}  // namespace amafia
