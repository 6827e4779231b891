// SPDX-License-Identifier: Apache-2.0
#include "amafia/stats/lda.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "amafia/error.hpp"
#include "amafia/rng.hpp"

namespace amafia::stats {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd as_vector(std::span<const double> v) { return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

double LdaModel::score(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dimension; ++i) s += weights[i] * x[i];
  return s;
}

LdaModel fit_lda(const Rows& x, std::span<const int> y) {
  if (x.size() != y.size() || x.empty()) throw Error(Errc::InvalidConfig, "lda: rows and labels differ in length");
  const auto d = static_cast<Eigen::Index>(x.front().size());
  if (d == 0) throw Error(Errc::InvalidConfig, "lda: zero-dimensional rows");

  VectorXd sum[2] = {VectorXd::Zero(d), VectorXd::Zero(d)};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<Eigen::Index>(x[i].size()) != d) throw Error(Errc::InvalidConfig, "lda: ragged rows");
    const int c = y[i] ? 1 : 0;
    sum[c] += as_vector(x[i]);
    ++count[c];
  }
  if (count[0] < 2 || count[1] < 2) throw Error(Errc::DegenerateClass, "lda: each class needs at least two samples");
  const VectorXd mu0 = sum[0] / static_cast<double>(count[0]);
  const VectorXd mu1 = sum[1] / static_cast<double>(count[1]);

  MatrixXd scatter = MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const VectorXd c = as_vector(x[i]) - (y[i] ? mu1 : mu0);
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  MatrixXd s = scatter.selfadjointView<Eigen::Lower>();
  s /= static_cast<double>(x.size() - 2);
  double eps = 1e-6 * s.trace() / static_cast<double>(d);
  if (!(eps > 0.0)) eps = 1e-12;
  s.diagonal().array() += eps;

  const VectorXd diff = mu1 - mu0;
  const Eigen::LDLT<MatrixXd> ldlt(s);
  VectorXd w = ldlt.solve(diff);
  // One round of iterative refinement tightens the residual on
  // ill-conditioned pooled covariances.
  w += ldlt.solve(diff - s * w);

  LdaModel m;
  m.dimension = static_cast<std::size_t>(d);
  m.mean0 = to_std(mu0);
  m.mean1 = to_std(mu1);
  m.covariance.assign(s.data(), s.data() + s.size());
  m.ridge = eps;
  m.weights = to_std(w);
  const double prior1 = static_cast<double>(count[1]) / static_cast<double>(x.size());
  m.threshold = w.dot(mu0 + mu1) / 2.0 - std::log(prior1 / (1.0 - prior1));
  return m;
}

double weight_residual(const LdaModel& m) {
  const auto d = static_cast<Eigen::Index>(m.dimension);
  const Eigen::Map<const MatrixXd> s(m.covariance.data(), d, d);
  const VectorXd diff = as_vector(m.mean1) - as_vector(m.mean0);
  const double denom = diff.norm();
  const double r = (s * as_vector(m.weights) - diff).norm();
  return denom > 0.0 ? r / denom : r;
}

double macro_f1(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error(Errc::InvalidConfig, "f1: length mismatch");
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool t = (truth[i] ? 1 : 0) == c;
      const bool p = (predicted[i] ? 1 : 0) == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    total += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  }
  return total / 2.0;
}

std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidConfig, "cross-validation needs at least two folds");
  std::vector<std::size_t> idx[2];
  for (std::size_t i = 0; i < y.size(); ++i) idx[y[i] ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c)
    if (idx[c].size() < static_cast<std::size_t>(2 * k))
      throw Error(Errc::DegenerateClass, "class " + std::to_string(c) + " has " + std::to_string(idx[c].size()) +
                                             " samples; " + std::to_string(2 * k) + " needed for " +
                                             std::to_string(k) + "-fold cross-validation");
  std::vector<int> fold(y.size(), 0);
  for (int c = 0; c < 2; ++c) {
    SeededRng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(std::span<std::size_t>(idx[c]));
    for (std::size_t j = 0; j < idx[c].size(); ++j) fold[idx[c][j]] = static_cast<int>(j % static_cast<std::size_t>(k));
  }
  return fold;
}

CvResult cross_validate_lda(const Rows& x, std::span<const int> y, int k, std::uint64_t seed) {
  const auto fold = stratified_folds(y, k, seed);
  CvResult out;
  for (int f = 0; f < k; ++f) {
    Rows train;
    std::vector<int> train_y;
    std::vector<int> truth;
    std::vector<int> predicted;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (fold[i] != f) {
        train.push_back(x[i]);
        train_y.push_back(y[i]);
      }
    const LdaModel m = fit_lda(train, train_y);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (fold[i] == f) {
        truth.push_back(y[i]);
        predicted.push_back(m.predict(x[i]));
      }
    out.fold_f1.push_back(macro_f1(truth, predicted));
  }
  double sum = 0.0;
  for (double v : out.fold_f1) sum += v;
  out.mean_f1 = sum / static_cast<double>(k);
  return out;
}

}  // namespace amafia::stats
