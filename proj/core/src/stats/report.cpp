// SPDX-License-Identifier: Apache-2.0
#include "amafia/stats/report.hpp"

#include <cmath>
#include <fstream>

#include "amafia/error.hpp"

namespace amafia::stats {

namespace {

using nlohmann::json;

constexpr double kStdReportTolerance = 0.01;

json summary_json(const Summary& s) {
  json j = {{"count", s.count}, {"mean", s.mean}, {"std", s.std}};
  if (std::abs(s.std - s.alt_std) > kStdReportTolerance) j["alt_std"] = s.alt_std;
  return j;
}

template <typename T, typename F>
json by_type_summary(const std::vector<T>& obs, F field, StdKind kind) {
  json out = json::object();
  for (PlayerType t : {PlayerType::Human, PlayerType::Llm}) {
    std::vector<double> xs;
    for (const auto& o : obs)
      if (o.type == t) xs.push_back(field(o));
    out[std::string(to_string(t))] = summary_json(summarize(xs, kind));
  }
  return out;
}

json table1(std::span<const GameView> games) {
  const auto o = dataset_overview(games);
  json per_game = json::array();
  for (const auto& g : games)
    per_game.push_back({{"game_id", g.game_id},
                        {"outcome", to_string(g.outcome)},
                        {"phases", g.phases.size()},
                        {"players", g.players.size()},
                        {"messages", g.messages.size()}});
  return {{"games", o.games},
          {"total_messages", o.total_messages},
          {"avg_phases", o.avg_phases},
          {"avg_players", o.avg_players},
          {"avg_messages", o.avg_messages},
          {"avg_agent_messages", o.avg_agent_messages},
          {"per_game", per_game}};
}

json table2(std::span<const GameView> games, StdKind kind) {
  try {
    const auto obs = msgs_per_player_per_day_phase(games);
    json out = json::object();
    for (PlayerType t : {PlayerType::Human, PlayerType::Llm}) {
      auto it = obs.find(t);
      out[std::string(to_string(t))] = summary_json(summarize(it == obs.end() ? std::vector<double>{} : it->second, kind));
    }
    return out;
  } catch (const Error& e) {
    if (e.code() != Errc::NoDaytimePhases) throw;
    return {{"skipped", e.what()}};
  }
}

json fig4(std::span<const GameView> games, StdKind kind) {
  json out = json::array();
  for (const auto& p : msgs_per_player_by_phase_index(games, kind)) {
    json j = summary_json(p.summary);
    j["day_index"] = p.day_index;
    out.push_back(std::move(j));
  }
  return out;
}

json fig5(std::span<const GameView> games, StdKind kind) {
  const auto d = mean_time_diffs(games);
  auto gaps = [](const std::vector<TimeGap>& v) {
    json a = json::array();
    for (const auto& g : v)
      a.push_back({{"game_id", g.game_id}, {"player", g.player.value}, {"type", to_string(g.type)},
                   {"mean_seconds", g.mean_seconds}});
    return a;
  };
  auto secs = [](const TimeGap& g) { return g.mean_seconds; };
  return {{"other", by_type_summary(d.other, secs, kind)},
          {"self", by_type_summary(d.self, secs, kind)},
          {"observations", {{"other", gaps(d.other)}, {"self", gaps(d.self)}}}};
}

json table3(std::span<const GameView> games, StdKind kind) {
  const auto obs = content_stats(games);
  json out = json::object();
  out["words_per_message"] = by_type_summary(obs, [](const ContentObservation& o) { return o.words_per_message; }, kind);
  out["repeated_messages"] = by_type_summary(obs, [](const ContentObservation& o) { return o.repeated_messages; }, kind);
  out["unique_words"] = by_type_summary(obs, [](const ContentObservation& o) { return o.unique_words; }, kind);
  json rows = json::array();
  for (const auto& o : obs)
    rows.push_back({{"game_id", o.game_id}, {"player", o.player.value}, {"type", to_string(o.type)},
                    {"words_per_message", o.words_per_message}, {"repeated_messages", o.repeated_messages},
                    {"unique_words", o.unique_words}});
  out["observations"] = rows;
  return out;
}

json fig7(std::span<const GameView> games) {
  json out = json::array();
  for (const auto& [key, cell] : win_rates(games))
    out.push_back({{"type", to_string(key.first)}, {"role", to_string(key.second)}, {"wins", cell.wins},
                   {"games", cell.games}, {"percent", cell.percent()}});
  return out;
}

json fig8(std::span<const GameView> games, TieRule rule) {
  const auto ranks = vote_out_speaking_rank(games, rule);
  json list = json::array();
  double sum = 0.0;
  for (const auto& r : ranks) {
    sum += r.normalized_rank;
    list.push_back({{"game_id", r.game_id}, {"day_index", r.day_index}, {"player", r.eliminated.value},
                    {"normalized_rank", r.normalized_rank}});
  }
  return {{"tie_rule", rule == TieRule::Average ? "average" : "min"},
          {"eliminations", ranks.size()},
          {"mean_rank", ranks.empty() ? 0.0 : sum / static_cast<double>(ranks.size())},
          {"histogram", rank_histogram(ranks)},
          {"ranks", list}};
}

json table5(std::span<const GameView> games, StdKind kind) {
  const auto s = survey_report(games, kind);
  if (!s.present) return {{"present", false}};
  return {{"present", true},
          {"guesses", s.guesses},
          {"correct", s.correct},
          {"identification_percent", s.identification_percent},
          {"human_similarity", summary_json(s.human_similarity)},
          {"timing", summary_json(s.timing)},
          {"relevance", summary_json(s.relevance)}};
}

json table4(std::span<const GameView> games, const ReportOptions& options) {
  if (!options.embedder) return {{"skipped", "no embedding provider configured"}};
  json splits = json::array();
  for (const auto& r : classify_messages(games, *options.embedder, {options.folds, options.seed})) {
    json j = {{"split", to_string(r.split)}, {"class0", r.class0}, {"class1", r.class1}};
    if (r.f1) {
      j["f1"] = *r.f1;
      j["fold_f1"] = r.fold_f1;
    }
    if (r.skipped) j["skipped"] = *r.skipped;
    splits.push_back(std::move(j));
  }
  return {{"embedding_model", options.embedder->model_id()}, {"splits", splits}};
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IOFailure, "cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

LoadedLogs load_games(const std::filesystem::path& path, std::string_view adapter) {
  LoadedLogs out;
  if (adapter == "native") {
    for (const auto& file : list_logs(path)) {
      try {
        out.games.push_back(build_view(read_log(file, {.require_outcome = false})));
      } catch (const Error& e) {
        out.skipped.push_back(file.filename().string() + ": " + e.what());
      }
    }
    return out;
  }
  for (const auto& log : import_external(path, adapter)) out.games.push_back(build_view(log));
  return out;
}

nlohmann::json build_report(const LoadedLogs& logs, const ReportOptions& options) {
  for (const auto& m : options.metrics)
    if (!known_metrics().contains(m)) throw Error(Errc::InvalidConfig, "unknown metric: " + m);
  const std::span<const GameView> games(logs.games);
  json r;
  r["protocol"] = {
      {"std", options.std_kind == StdKind::Population ? "population" : "sample"},
      {"alt_std_reported_above", kStdReportTolerance},
      {"tie_rule", options.tie_rule == TieRule::Average ? "average" : "min"},
      {"normalizer", "ascii lowercase; ascii and common unicode punctuation removed; whitespace collapsed"},
      {"time_gap_other", "latest earlier message by another player in the player's visible scope"},
      {"win_rate_and_survey", "aborted and unfinished games excluded"},
      {"classification", "stratified " + std::to_string(options.folds) +
                             "-fold cross-validation, seed " + std::to_string(options.seed) +
                             ", two-class LDA with ridge 1e-6*trace/d, macro F1 averaged over folds"},
  };
  r["games"] = logs.games.size();
  r["skipped_logs"] = logs.skipped;
  const auto& m = options.metrics;
  if (m.contains("table1")) r["table1"] = table1(games);
  if (m.contains("table2")) r["table2"] = table2(games, options.std_kind);
  if (m.contains("fig4")) r["fig4"] = fig4(games, options.std_kind);
  if (m.contains("fig5")) r["fig5"] = fig5(games, options.std_kind);
  if (m.contains("table3")) r["table3"] = table3(games, options.std_kind);
  if (m.contains("fig7")) r["fig7"] = fig7(games);
  if (m.contains("fig8")) r["fig8"] = fig8(games, options.tie_rule);
  if (m.contains("table5")) r["table5"] = table5(games, options.std_kind);
  if (m.contains("table4")) r["table4"] = table4(games, options);
  return r;
}

std::vector<std::filesystem::path> write_series(const nlohmann::json& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::vector<std::string>& columns,
                  const std::vector<std::vector<std::string>>& rows) {
    write_csv(dir / name, columns, rows);
    written.push_back(dir / name);
  };

  if (report.contains("fig4")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : report["fig4"])
      rows.push_back({cell(p["day_index"]), cell(p["count"]), cell(p["mean"]), cell(p["std"])});
    emit("fig4_messages_by_day.csv", {"day_index", "observations", "mean_messages", "std"}, rows);
  }
  if (report.contains("fig5")) {
    std::vector<std::vector<std::string>> rows;
    for (const char* kind : {"other", "self"})
      for (const auto& g : report["fig5"]["observations"][kind])
        rows.push_back({cell(g["game_id"]), cell(g["player"]), cell(g["type"]), kind, cell(g["mean_seconds"])});
    emit("fig5_time_diffs.csv", {"game_id", "player", "type", "gap", "mean_seconds"}, rows);
  }
  if (report.contains("table3") && report["table3"].contains("observations")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& o : report["table3"]["observations"])
      rows.push_back({cell(o["game_id"]), cell(o["player"]), cell(o["type"]), cell(o["words_per_message"]),
                      cell(o["repeated_messages"]), cell(o["unique_words"])});
    emit("table3_content.csv",
         {"game_id", "player", "type", "words_per_message", "repeated_messages", "unique_words"}, rows);
  }
  if (report.contains("fig7")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : report["fig7"])
      rows.push_back({cell(c["type"]), cell(c["role"]), cell(c["wins"]), cell(c["games"]), cell(c["percent"])});
    emit("fig7_win_rates.csv", {"type", "role", "wins", "games", "percent"}, rows);
  }
  if (report.contains("fig8")) {
    std::vector<std::vector<std::string>> rows;
    const auto& h = report["fig8"]["histogram"];
    for (std::size_t b = 0; b < h.size(); ++b)
      rows.push_back({std::to_string(b), json(static_cast<double>(b) / 10.0).dump(),
                      json(static_cast<double>(b + 1) / 10.0).dump(), cell(h[b])});
    emit("fig8_rank_histogram.csv", {"bin", "low", "high", "eliminations"}, rows);
    rows.clear();
    for (const auto& r : report["fig8"]["ranks"])
      rows.push_back({cell(r["game_id"]), cell(r["day_index"]), cell(r["player"]), cell(r["normalized_rank"])});
    emit("fig8_ranks.csv", {"game_id", "day_index", "player", "normalized_rank"}, rows);
  }
  return written;
}

}  // namespace amafia::stats
