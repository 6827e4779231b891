// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace amafia::stats {

/// Row-major sample matrix: one row per observation.
using Rows = std::vector<std::vector<double>>;

/// Two-class linear discriminant. Class 1 is predicted when
/// dot(weights, x) > threshold.
struct LdaModel {
  std::size_t dimension = 0;
  std::vector<double> mean0;
  std::vector<double> mean1;
  std::vector<double> covariance;  // pooled, ridge included; row-major d x d
  double ridge = 0.0;
  std::vector<double> weights;
  double threshold = 0.0;

  double score(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return score(x) > threshold ? 1 : 0; }
};

/// Fits on rows labelled 0/1. The pooled covariance is the within-class
/// scatter over (n - 2), plus eps*I with eps = 1e-6 * trace / d.
/// Throws DegenerateClass when a class has fewer than two rows.
LdaModel fit_lda(const Rows& x, std::span<const int> y);

/// |S w - (mu1 - mu0)| / |mu1 - mu0| for the stored S.
double weight_residual(const LdaModel& m);

/// Unweighted mean of the per-class F1 scores for labels 0 and 1.
double macro_f1(std::span<const int> truth, std::span<const int> predicted);

/// Fold id per row, stratified: rows of each class are shuffled with a
/// seeded RNG and dealt round-robin. Throws DegenerateClass when a class has
/// fewer than 2*k rows.
std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

struct CvResult {
  double mean_f1 = 0.0;
  std::vector<double> fold_f1;
};

CvResult cross_validate_lda(const Rows& x, std::span<const int> y, int k, std::uint64_t seed);

}  // namespace amafia::stats
