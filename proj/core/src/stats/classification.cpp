// SPDX-License-Identifier: Apache-2.0
#include "amafia/stats/classification.hpp"

#include "amafia/error.hpp"
#include "amafia/rng.hpp"
#include "amafia/stats/lda.hpp"

namespace amafia::stats {

std::string_view to_string(LabelSplit s) noexcept {
  switch (s) {
    case LabelSplit::LlmVsHuman: return "llm_vs_human";
    case LabelSplit::MafiaVsBystander: return "mafia_vs_bystander";
    case LabelSplit::NightVsDay: return "night_vs_day";
  }
  return "?";
}

int message_label(const GameView& game, const ViewMessage& m, LabelSplit split) {
  switch (split) {
    case LabelSplit::LlmVsHuman: {
      const auto* p = game.player(m.author);
      return p && p->type == PlayerType::Llm ? 1 : 0;
    }
    case LabelSplit::MafiaVsBystander: {
      const auto* p = game.player(m.author);
      return p && p->role == Role::Mafia ? 1 : 0;
    }
    case LabelSplit::NightVsDay: return m.scope == Scope::NighttimeMafia ? 1 : 0;
  }
  return 0;
}

std::vector<SplitResult> classify_messages(std::span<const GameView> games, Embedder& embedder,
                                           const ClassificationOptions& options) {
  std::vector<std::string> texts;
  for (const auto& g : games)
    for (const auto& m : g.messages) texts.push_back(m.content);

  std::vector<SplitResult> out;
  Rows rows;
  if (!texts.empty())
    for (auto& e : embedder.embed(texts)) rows.push_back(std::move(e.values));

  for (LabelSplit split : kAllSplits) {
    SplitResult r;
    r.split = split;
    std::vector<int> labels;
    for (const auto& g : games)
      for (const auto& m : g.messages) labels.push_back(message_label(g, m, split));
    for (int l : labels) (l ? r.class1 : r.class0)++;
    try {
      const auto cv = cross_validate_lda(rows, labels, options.folds, derive_seed(options.seed, static_cast<std::uint64_t>(split)));
      r.f1 = cv.mean_f1;
      r.fold_f1 = cv.fold_f1;
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateClass) throw;
      r.skipped = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace amafia::stats
