// SPDX-License-Identifier: Apache-2.0
// gamestats: analysis over a directory of game logs.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "amafia/error.hpp"
#include "amafia/stats/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Message, timing, win-rate, survey and embedding statistics over game logs"};
  std::string logs_dir;
  std::vector<std::string> metrics{"all"};
  std::string emit;
  std::string embed_endpoint;
  std::string embed_model = "bge-m3";
  std::string embed_cache;
  bool stub_embeddings = false;
  int folds = 5;
  std::uint64_t seed = 0;
  bool sample_std = false;
  bool min_tie = false;
  std::string adapter = "native";
  app.add_option("logs-dir", logs_dir, "Directory of logs (or of exported game folders with --adapter)")
      ->required()
      ->check(CLI::ExistingDirectory);
  app.add_option("--metric", metrics, "all|table1|table2|table3|table4|table5|fig4|fig5|fig7|fig8 (repeatable)")
      ->capture_default_str();
  app.add_option("--emit", emit, "report file (*.txt, *.json) or a directory for CSV series");
  app.add_option("--embed-endpoint", embed_endpoint, "Embedding server base URL (default: AMAFIA_EMBED_URL)");
  app.add_option("--embed-model", embed_model, "Embedding model name")->capture_default_str();
  app.add_option("--embed-cache", embed_cache, "Embedding cache directory");
  app.add_flag("--stub-embeddings", stub_embeddings, "Use offline hash embeddings (pipeline check only)");
  app.add_option("--folds", folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 100));
  app.add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
  app.add_flag("--sample-std", sample_std, "Report sample rather than population standard deviation");
  app.add_flag("--min-tie", min_tie, "Tied speakers share the lowest rank instead of the average");
  app.add_option("--adapter", adapter, "native|textdump")->capture_default_str()->check(CLI::IsMember({"native", "textdump"}));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  try {
    namespace st = amafia::stats;
    st::ReportOptions options;
    if (std::find(metrics.begin(), metrics.end(), "all") == metrics.end())
      options.metrics = std::set<std::string>(metrics.begin(), metrics.end());
    options.std_kind = sample_std ? st::StdKind::Sample : st::StdKind::Population;
    options.tie_rule = min_tie ? st::TieRule::Min : st::TieRule::Average;
    options.folds = folds;
    options.seed = seed;

    std::unique_ptr<amafia::Embedder> embedder;
    if (options.metrics.contains("table4")) {
      std::shared_ptr<amafia::EmbeddingProvider> provider;
      if (stub_embeddings) {
        provider = std::make_shared<amafia::HashEmbeddingProvider>();
      } else {
        auto ep = amafia::embedding_endpoint_from_env();
        if (!embed_endpoint.empty()) {
          if (!ep) ep.emplace();
          ep->base_url = embed_endpoint;
        }
        if (ep) provider = std::make_shared<amafia::HttpEmbeddingProvider>(*ep, embed_model);
      }
      if (provider) {
        std::optional<std::filesystem::path> cache;
        if (!embed_cache.empty()) cache = std::filesystem::path(embed_cache);
        embedder = std::make_unique<amafia::Embedder>(provider, cache);
        options.embedder = embedder.get();
      }
    }

    const auto logs = st::load_games(logs_dir, adapter);
    for (const auto& s : logs.skipped) std::cerr << "skipped " << s << "\n";
    const auto report = st::build_report(logs, options);
    const std::string text = report.dump(2) + "\n";

    if (emit.empty()) {
      std::cout << text;
      return 0;
    }
    const std::filesystem::path out(emit);
    if (out.extension() == ".txt" || out.extension() == ".json") {
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      if (!f) throw amafia::Error(amafia::Errc::IOFailure, "cannot write " + emit);
      f << text;
    } else {
      for (const auto& p : st::write_series(report, out)) std::cout << p.string() << "\n";
      std::ofstream f(out / "report.json", std::ios::binary | std::ios::trunc);
      f << text;
      std::cout << (out / "report.json").string() << "\n";
    }
  } catch (const amafia::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
