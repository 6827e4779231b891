// SPDX-License-Identifier: Apache-2.0
#include "amafia/server/game_config.hpp"

#include <fstream>
#include <set>

#include "amafia/error.hpp"
#include "amafia/prompt/templates.hpp"

namespace amafia {

namespace {

const std::vector<std::string>& pool() {
  static const std::vector<std::string> names = {
      "Aaron",  "Bella",  "Carter", "Daisy",  "Elliot", "Fiona",  "Gavin",  "Hazel",  "Isaac",
      "Jasmine", "Kevin", "Lila",   "Milo",   "Nora",   "Oscar",  "Piper",  "Quinn",  "Ruby",
      "Simon",  "Tessa",  "Umar",   "Violet", "Wesley", "Ximena", "Yosef",  "Zara",   "Brent",
      "Cora",   "Dexter", "Elena"};
  return names;
}

template <typename T>
void read_into(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void read_ms(const nlohmann::json& j, const char* key, Duration& out) {
  if (auto it = j.find(key); it != j.end()) out = Duration{it->get<std::int64_t>()};
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto k : known) ok = ok || k == it.key();
    if (!ok) throw Error(Errc::InvalidConfig, "unknown key '" + it.key() + "' in " + std::string(where));
  }
}

}  // namespace

std::span<const std::string> default_name_pool() { return pool(); }

std::string_view consent_text(std::string_view version) {
  if (version == "v1") return templates::get("consent_v1");
  throw Error(Errc::InvalidConfig, "unknown consent version '" + std::string(version) + "'");
}

void GameConfig::validate() const {
  if (schema_version != kGameConfigSchema)
    throw Error(Errc::InvalidConfig, "unsupported config schema " + std::to_string(schema_version));
  if (roster_size < kMinPlayers) throw Error(Errc::InvalidConfig, "roster must have at least 4 seats");
  if (roster_size > kMaxPlayers) throw Error(Errc::InvalidConfig, "roster must have at most 20 seats");
  if (day_duration <= Duration::zero() || night_duration <= Duration::zero())
    throw Error(Errc::InvalidConfig, "phase durations must be > 0");
  if (max_rounds < 1) throw Error(Errc::InvalidConfig, "max_rounds must be >= 1");
  if (agent_count < 0 || agent_count >= roster_size)
    throw Error(Errc::InvalidConfig, "agent_count must leave at least one human seat");
  if (survey_window <= Duration::zero()) throw Error(Errc::InvalidConfig, "survey_window must be > 0");
  const auto names = name_pool.empty() ? default_name_pool() : std::span<const std::string>(name_pool);
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size()) throw Error(Errc::InvalidConfig, "name pool has duplicates");
  if (static_cast<int>(names.size()) < roster_size)
    throw Error(Errc::InvalidConfig, "name pool smaller than the roster");
  for (const auto& n : names)
    if (n.empty() || n == kGameManagerName || n.find(':') != std::string::npos)
      throw Error(Errc::InvalidConfig, "invalid character name '" + n + "'");
  (void)consent_text(consent_version);
  agent.validate();
}

nlohmann::json to_json(const DecodingParams& p) {
  return {{"max_new_tokens", p.max_new_tokens},
          {"repetition_penalty", p.repetition_penalty},
          {"do_sample", p.do_sample},
          {"temperature", p.temperature},
          {"no_repeat_ngram_size", p.no_repeat_ngram_size}};
}

DecodingParams decoding_params_from_json(const nlohmann::json& j, DecodingParams p) {
  reject_unknown(j, {"max_new_tokens", "repetition_penalty", "do_sample", "temperature", "no_repeat_ngram_size"},
                 "decoding params");
  read_into(j, "max_new_tokens", p.max_new_tokens);
  read_into(j, "repetition_penalty", p.repetition_penalty);
  read_into(j, "do_sample", p.do_sample);
  read_into(j, "temperature", p.temperature);
  read_into(j, "no_repeat_ngram_size", p.no_repeat_ngram_size);
  return p;
}

nlohmann::json to_json(const GameConfig& c) {
  const auto& a = c.agent;
  return {{"schema_version", c.schema_version},
          {"roster_size", c.roster_size},
          {"day_ms", c.day_duration.count()},
          {"night_ms", c.night_duration.count()},
          {"max_rounds", c.max_rounds},
          {"rng_seed", c.rng_seed},
          {"agent_count", c.agent_count},
          {"consent_version", c.consent_version},
          {"name_pool", c.name_pool},
          {"prompt_utc_offset_min", c.prompt_utc_offset.count()},
          {"survey_window_ms", c.survey_window.count()},
          {"agent",
           {{"personality", a.personality},
            {"words_per_second", a.words_per_second},
            {"min_iteration_gap_ms", a.min_iteration_gap.count()},
            {"idle_poll_ms", a.idle_poll.count()},
            {"vote_trigger_fraction", a.vote_trigger_fraction},
            {"participate_at_night", a.participate_at_night},
            {"scheduler_model", a.scheduler_model},
            {"generator_model", a.generator_model},
            {"voter_model", a.voter_model},
            {"scheduler_params", to_json(a.scheduler_params)},
            {"generator_params", to_json(a.generator_params)},
            {"voter_params", to_json(a.voter_params)}}}};
}

GameConfig game_config_from_json(const nlohmann::json& j) {
  GameConfig c;
  try {
    if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be an object");
    reject_unknown(j,
                   {"schema_version", "roster_size", "day_ms", "night_ms", "max_rounds", "rng_seed", "agent_count",
                    "consent_version", "name_pool", "prompt_utc_offset_min", "survey_window_ms", "agent"},
                   "game config");
    read_into(j, "schema_version", c.schema_version);
    read_into(j, "roster_size", c.roster_size);
    read_ms(j, "day_ms", c.day_duration);
    read_ms(j, "night_ms", c.night_duration);
    read_into(j, "max_rounds", c.max_rounds);
    read_into(j, "rng_seed", c.rng_seed);
    read_into(j, "agent_count", c.agent_count);
    read_into(j, "consent_version", c.consent_version);
    read_into(j, "name_pool", c.name_pool);
    if (auto it = j.find("prompt_utc_offset_min"); it != j.end())
      c.prompt_utc_offset = std::chrono::minutes{it->get<int>()};
    read_ms(j, "survey_window_ms", c.survey_window);
    if (auto it = j.find("agent"); it != j.end()) {
      const auto& a = *it;
      reject_unknown(a,
                     {"personality", "words_per_second", "min_iteration_gap_ms", "idle_poll_ms",
                      "vote_trigger_fraction", "participate_at_night", "scheduler_model", "generator_model",
                      "voter_model", "scheduler_params", "generator_params", "voter_params"},
                     "agent config");
      read_into(a, "personality", c.agent.personality);
      read_into(a, "words_per_second", c.agent.words_per_second);
      read_ms(a, "min_iteration_gap_ms", c.agent.min_iteration_gap);
      read_ms(a, "idle_poll_ms", c.agent.idle_poll);
      read_into(a, "vote_trigger_fraction", c.agent.vote_trigger_fraction);
      read_into(a, "participate_at_night", c.agent.participate_at_night);
      read_into(a, "scheduler_model", c.agent.scheduler_model);
      read_into(a, "generator_model", c.agent.generator_model);
      read_into(a, "voter_model", c.agent.voter_model);
      if (a.contains("scheduler_params"))
        c.agent.scheduler_params = decoding_params_from_json(a["scheduler_params"], c.agent.scheduler_params);
      if (a.contains("generator_params"))
        c.agent.generator_params = decoding_params_from_json(a["generator_params"], c.agent.generator_params);
      if (a.contains("voter_params"))
        c.agent.voter_params = decoding_params_from_json(a["voter_params"], c.agent.voter_params);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

GameConfig load_game_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IOFailure, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
  }
  return game_config_from_json(j);
}

}  // namespace amafia
