// Copyright 2026 The Mosaig Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MOSAIG_METRICS_HPP_
#define MOSAIG_METRICS_HPP_

// Dense numeric kernels behind the scores and the agreement statistics.
// Everything here is templated on the Eigen expression type so callers can
// pass blocks, maps and float or double matrices.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>

#include "mosaig/errors.hpp"

namespace mosaig::metrics {

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw InvariantViolation("embedding dimensions differ");
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) throw InvariantViolation("zero-length embedding");
  Scalar c = a.dot(b) / (na * nb);
  // Rounding can push |c| a hair past one.
  return std::max(Scalar(-1), std::min(Scalar(1), c));
}

// Rows must be probability distributions within `tol`.
template <typename Derived>
void check_distributions(const Eigen::MatrixBase<Derived>& probs, typename Derived::Scalar tol = 1e-6) {
  using Scalar = typename Derived::Scalar;
  if (probs.cols() < 1) throw InvariantViolation("classifier produced no classes");
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    if (!probs.row(i).allFinite() || (probs.row(i).array() < Scalar(0)).any())
      throw InvariantViolation("classifier output row " + std::to_string(i) + " has negative or non-finite mass");
    if (std::abs(probs.row(i).sum() - Scalar(1)) > tol)
      throw InvariantViolation("classifier output row " + std::to_string(i) + " does not sum to 1");
  }
}

// KL(p || q) with the 0 log 0 = 0 convention.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar kl_divergence(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  Scalar kl(0);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const Scalar pk = p(k);
    if (pk > Scalar(0)) kl += pk * (std::log(pk) - std::log(q(k)));
  }
  return kl;
}

// exp(mean_x KL(p(y|x) || p(y))) over the rows of `probs` (one row per
// image). With splits > 1 the rows are cut into that many contiguous
// chunks of floor(n / splits) rows and the per-chunk scores are averaged.
template <typename Derived>
typename Derived::Scalar inception_score(const Eigen::MatrixBase<Derived>& probs, int splits = 1) {
  using Scalar = typename Derived::Scalar;
  if (splits < 1) throw ValidationError("splits must be >= 1");
  const Eigen::Index n = probs.rows();
  const Eigen::Index chunk = n / splits;
  if (chunk < 2) throw ValidationError("inception score needs at least 2 images per split");
  check_distributions(probs);
  Scalar total(0);
  for (int s = 0; s < splits; ++s) {
    auto part = probs.middleRows(s * chunk, chunk);
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> marginal = part.colwise().mean();
    Scalar mean_kl(0);
    for (Eigen::Index i = 0; i < chunk; ++i) mean_kl += kl_divergence(part.row(i), marginal);
    mean_kl /= Scalar(chunk);
    total += std::exp(mean_kl);
  }
  return total / Scalar(splits);
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw ValidationError("correlation inputs differ in length");
  if (x.size() < 3) throw ValidationError("correlation needs at least 3 paired points");
  const auto dx = (x.array() - x.mean()).matrix();
  const auto dy = (y.array() - y.mean()).matrix();
  const Scalar sxx = dx.squaredNorm();
  const Scalar syy = dy.squaredNorm();
  if (sxx == Scalar(0) || syy == Scalar(0)) throw UndefinedStatisticError("correlation undefined: zero variance");
  return dx.dot(dy) / std::sqrt(sxx * syy);
}

enum class KappaWeighting { Linear, Quadratic };

// Joint proportions over `categories` ordinal levels 1..categories.
inline Eigen::MatrixXd contingency(std::span<const int> a, std::span<const int> b, int categories = 5) {
  if (a.size() != b.size() || a.empty()) throw ValidationError("rating vectors must be non-empty and equal length");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(categories, categories);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 1 || a[i] > categories || b[i] < 1 || b[i] > categories)
      throw ValidationError("rating outside 1.." + std::to_string(categories));
    counts(a[i] - 1, b[i] - 1) += 1.0;
  }
  return counts / static_cast<double>(a.size());
}

inline Eigen::MatrixXd kappa_weights(KappaWeighting weighting, int categories = 5) {
  const double span = categories - 1;
  Eigen::MatrixXd w(categories, categories);
  for (int i = 0; i < categories; ++i)
    for (int j = 0; j < categories; ++j) {
      const double d = std::abs(i - j) / span;
      w(i, j) = weighting == KappaWeighting::Linear ? d : d * d;
    }
  return w;
}

// 1 - sum(W .* O) / sum(W .* E), with E the outer product of the marginals.
inline double weighted_kappa(std::span<const int> a, std::span<const int> b,
                             KappaWeighting weighting = KappaWeighting::Quadratic, int categories = 5) {
  const Eigen::MatrixXd observed = contingency(a, b, categories);
  const Eigen::VectorXd rows = observed.rowwise().sum();
  const Eigen::RowVectorXd cols = observed.colwise().sum();
  const Eigen::MatrixXd expected = rows * cols;
  const Eigen::MatrixXd w = kappa_weights(weighting, categories);
  const double disagreement_expected = w.cwiseProduct(expected).sum();
  if (disagreement_expected == 0.0)
    throw UndefinedStatisticError("weighted kappa undefined: both raters use a single shared category");
  return 1.0 - w.cwiseProduct(observed).sum() / disagreement_expected;
}

}  // namespace mosaig::metrics

#endif  // MOSAIG_METRICS_HPP_
