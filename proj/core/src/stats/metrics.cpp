// SPDX-License-Identifier: Apache-2.0
#include "amafia/stats/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "amafia/error.hpp"

namespace amafia::stats {

Summary summarize(std::span<const double> xs, StdKind kind) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double pop = std::sqrt(ss / static_cast<double>(xs.size()));
  const double sample = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  s.std = kind == StdKind::Population ? pop : sample;
  s.alt_std = kind == StdKind::Population ? sample : pop;
  return s;
}

namespace {

int count_messages(const GameView& g, const PlayerId& who, Scope scope, int phase_index) {
  return static_cast<int>(std::count_if(g.messages.begin(), g.messages.end(), [&](const ViewMessage& m) {
    return m.author == who && m.scope == scope && m.phase_index == phase_index;
  }));
}

double seconds(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

}  // namespace

DatasetOverview dataset_overview(std::span<const GameView> games) {
  DatasetOverview o;
  o.games = games.size();
  if (games.empty()) return o;
  double phases = 0, players = 0, agent_msgs = 0;
  for (const auto& g : games) {
    phases += static_cast<double>(g.phases.size());
    players += static_cast<double>(g.players.size());
    o.total_messages += g.messages.size();
    for (const auto& m : g.messages)
      if (const auto* p = g.player(m.author); p && p->type == PlayerType::Llm) ++agent_msgs;
  }
  const auto n = static_cast<double>(games.size());
  o.avg_phases = phases / n;
  o.avg_players = players / n;
  o.avg_messages = static_cast<double>(o.total_messages) / n;
  o.avg_agent_messages = agent_msgs / n;
  return o;
}

ByType<std::vector<double>> msgs_per_player_per_day_phase(std::span<const GameView> games) {
  ByType<std::vector<double>> out;
  bool any_day = false;
  for (const auto& g : games)
    for (const auto& ph : g.phases) {
      if (ph.kind != PhaseKind::Daytime) continue;
      any_day = true;
      for (const auto& p : g.players)
        if (ph.living.contains(p.id))
          out[p.type].push_back(count_messages(g, p.id, Scope::DaytimePublic, ph.index));
    }
  if (!any_day) throw Error(Errc::NoDaytimePhases, "no daytime phases in the given logs");
  return out;
}

std::vector<PhaseIndexPoint> msgs_per_player_by_phase_index(std::span<const GameView> games, StdKind kind) {
  std::map<int, std::vector<double>> by_index;
  for (const auto& g : games)
    for (const auto& ph : g.phases) {
      if (ph.kind != PhaseKind::Daytime) continue;
      auto& obs = by_index[ph.index];
      for (const auto& p : g.players)
        if (ph.living.contains(p.id)) obs.push_back(count_messages(g, p.id, Scope::DaytimePublic, ph.index));
    }
  std::vector<PhaseIndexPoint> out;
  for (const auto& [index, obs] : by_index) out.push_back({index, summarize(obs, kind)});
  return out;
}

TimeDiffs mean_time_diffs(std::span<const GameView> games) {
  TimeDiffs out;
  for (const auto& g : games)
    for (const auto& p : g.players) {
      double other_sum = 0, self_sum = 0;
      int other_n = 0, self_n = 0;
      std::optional<TimePoint> last_other;
      std::optional<TimePoint> last_own;
      for (const auto& m : g.messages) {
        if (m.author == p.id) {
          if (last_other) {
            other_sum += seconds(m.ts - *last_other);
            ++other_n;
          }
          if (last_own) {
            self_sum += seconds(m.ts - *last_own);
            ++self_n;
          }
          last_own = m.ts;
        } else if (visible_to(m.scope, p.role)) {
          last_other = m.ts;
        }
      }
      if (other_n) out.other.push_back({g.game_id, p.id, p.type, other_sum / other_n});
      if (self_n) out.self.push_back({g.game_id, p.id, p.type, self_sum / self_n});
    }
  return out;
}

namespace {

// Decodes one UTF-8 code point; invalid bytes come back as themselves.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto c = static_cast<unsigned char>(s[i]);
  int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 1;
  if (i + len > s.size()) len = 1;
  char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1f) : len == 3 ? (c & 0x0f) : (c & 0x07);
  for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
  i += len;
  return cp;
}

bool is_unicode_punct(char32_t cp) {
  return cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 || cp == 0xBB || cp == 0xBF ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x3001 && cp <= 0x3003) ||
         (cp >= 0x3008 && cp <= 0x3011) || (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20);
}

bool is_unicode_space(char32_t cp) { return cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x3000; }

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t begin = i;
    const char32_t cp = next_code_point(text, i);
    const bool space = (cp < 0x80 && std::isspace(static_cast<int>(cp))) || is_unicode_space(cp);
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if ((cp < 0x80 && std::ispunct(static_cast<int>(cp))) || is_unicode_punct(cp)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (cp < 0x80)
      out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    else
      out.append(text.substr(begin, i - begin));
  }
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<ContentObservation> content_stats(std::span<const GameView> games) {
  std::vector<ContentObservation> out;
  for (const auto& g : games)
    for (const auto& p : g.players) {
      std::size_t n = 0, words = 0, repeated = 0;
      std::set<std::string> seen;
      std::set<std::string> vocabulary;
      for (const auto& m : g.messages) {
        if (m.author != p.id) continue;
        ++n;
        words += whitespace_tokens(m.content).size();
        std::string norm = normalize_text(m.content);
        for (auto& t : whitespace_tokens(norm)) vocabulary.insert(std::move(t));
        if (!seen.insert(std::move(norm)).second) ++repeated;
      }
      if (n == 0) continue;
      out.push_back({g.game_id, p.id, p.type, static_cast<double>(words) / static_cast<double>(n),
                     static_cast<double>(repeated), static_cast<double>(vocabulary.size())});
    }
  return out;
}

std::map<std::pair<PlayerType, Role>, WinCell> win_rates(std::span<const GameView> games) {
  std::map<std::pair<PlayerType, Role>, WinCell> out;
  for (const auto& g : games) {
    if (g.outcome != Outcome::MafiaWin && g.outcome != Outcome::BystanderWin) continue;
    const Role winner = g.outcome == Outcome::MafiaWin ? Role::Mafia : Role::Bystander;
    for (const auto& p : g.players) {
      auto& cell = out[{p.type, p.role}];
      ++cell.games;
      if (p.role == winner) ++cell.wins;
    }
  }
  return out;
}

double normalized_rank(std::span<const int> counts, std::size_t target, TieRule rule) {
  if (counts.size() < 2 || target >= counts.size())
    throw Error(Errc::InvalidConfig, "rank needs at least two players");
  const int v = counts[target];
  const auto less = std::count_if(counts.begin(), counts.end(), [v](int c) { return c < v; });
  const auto equal = std::count(counts.begin(), counts.end(), v);
  const double rank =
      rule == TieRule::Average ? static_cast<double>(less) + static_cast<double>(equal - 1) / 2.0 : static_cast<double>(less);
  return rank / static_cast<double>(counts.size() - 1);
}

std::vector<EliminationRank> vote_out_speaking_rank(std::span<const GameView> games, TieRule rule) {
  std::vector<EliminationRank> out;
  for (const auto& g : games)
    for (const auto& ph : g.phases) {
      if (ph.kind != PhaseKind::Daytime || !ph.eliminated || ph.living.size() < 2) continue;
      std::vector<int> counts;
      std::size_t target = 0;
      for (const auto& p : g.players) {
        if (!ph.living.contains(p.id)) continue;
        if (p.id == *ph.eliminated) target = counts.size();
        counts.push_back(count_messages(g, p.id, Scope::DaytimePublic, ph.index));
      }
      out.push_back({g.game_id, ph.index, *ph.eliminated, normalized_rank(counts, target, rule)});
    }
  return out;
}

std::array<std::size_t, 10> rank_histogram(std::span<const EliminationRank> ranks) {
  std::array<std::size_t, 10> bins{};
  for (const auto& r : ranks) {
    auto b = static_cast<std::size_t>(std::floor(r.normalized_rank * 10.0));
    ++bins[std::min<std::size_t>(b, 9)];
  }
  return bins;
}

SurveyReport survey_report(std::span<const GameView> games, StdKind kind) {
  SurveyReport r;
  std::vector<double> hs, timing, relevance;
  for (const auto& g : games) {
    if (g.outcome == Outcome::Aborted || g.outcome == Outcome::Ongoing) continue;
    for (const auto& s : g.survey) {
      r.present = true;
      if (s.guessed_agent) {
        ++r.guesses;
        for (const auto& p : g.players)
          if (p.type == PlayerType::Llm && p.name == *s.guessed_agent) {
            ++r.correct;
            break;
          }
      }
      if (s.human_similarity) hs.push_back(*s.human_similarity);
      if (s.timing) timing.push_back(*s.timing);
      if (s.relevance) relevance.push_back(*s.relevance);
    }
  }
  if (r.guesses) r.identification_percent = 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.guesses);
  r.human_similarity = summarize(hs, kind);
  r.timing = summarize(timing, kind);
  r.relevance = summarize(relevance, kind);
  return r;
}

}  // namespace amafia::stats
