// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amafia/llm/embedding.hpp"
#include "amafia/stats/game_view.hpp"

namespace amafia::stats {

enum class LabelSplit : std::uint8_t { LlmVsHuman, MafiaVsBystander, NightVsDay };
std::string_view to_string(LabelSplit s) noexcept;
inline constexpr LabelSplit kAllSplits[] = {LabelSplit::LlmVsHuman, LabelSplit::MafiaVsBystander,
                                            LabelSplit::NightVsDay};

/// Label 1 for LLM / mafia / nighttime messages.
int message_label(const GameView& game, const ViewMessage& m, LabelSplit split);

struct SplitResult {
  LabelSplit split = LabelSplit::LlmVsHuman;
  std::size_t class0 = 0;
  std::size_t class1 = 0;
  std::optional<double> f1;            // mean macro F1 over folds
  std::vector<double> fold_f1;
  std::optional<std::string> skipped;  // reason when the split could not be evaluated
};

struct ClassificationOptions {
  int folds = 5;
  std::uint64_t seed = 0;
};

/// Embeds every player message once, then cross-validates an LDA per split.
/// Splits with a class too small for the fold count are reported as skipped.
std::vector<SplitResult> classify_messages(std::span<const GameView> games, Embedder& embedder,
                                           const ClassificationOptions& options);

}  // namespace amafia::stats
