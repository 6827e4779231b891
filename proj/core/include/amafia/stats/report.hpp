// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amafia/stats/classification.hpp"
#include "amafia/stats/metrics.hpp"

namespace amafia::stats {

struct LoadedLogs {
  std::vector<GameView> games;
  std::vector<std::string> skipped;  // "<file>: <reason>"
};

/// Loads every log under `path` with the given import adapter ("native" or
/// "textdump"). Native logs that fail validation are skipped, not fatal.
LoadedLogs load_games(const std::filesystem::path& path, std::string_view adapter = "native");

inline const std::set<std::string>& known_metrics() {
  static const std::set<std::string> m = {"table1", "table2", "table3", "table4", "table5",
                                          "fig4",   "fig5",   "fig7",   "fig8"};
  return m;
}

struct ReportOptions {
  std::set<std::string> metrics = known_metrics();
  StdKind std_kind = StdKind::Population;
  TieRule tie_rule = TieRule::Average;
  int folds = 5;
  std::uint64_t seed = 0;
  Embedder* embedder = nullptr;  // table4 is skipped without one
};

/// Deterministic: the same games and options give the same JSON bytes.
nlohmann::json build_report(const LoadedLogs& logs, const ReportOptions& options);

/// Writes one CSV file per figure/table series into `dir` (created if
/// missing) and returns the written paths. Columns are listed in the first
/// row of each file.
std::vector<std::filesystem::path> write_series(const nlohmann::json& report, const std::filesystem::path& dir);

}  // namespace amafia::stats
