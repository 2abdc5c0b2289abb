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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mosaig/analysis.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/metrics.hpp"

namespace mosaig {
namespace {

using metrics::KappaWeighting;

// Brute-force O/E table construction, no Eigen.
double kappa_oracle(const std::vector<int>& a, const std::vector<int>& b, KappaWeighting w) {
  double O[5][5] = {};
  double pa[5] = {}, pb[5] = {};
  const double n = static_cast<double>(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    O[a[k] - 1][b[k] - 1] += 1.0 / n;
    pa[a[k] - 1] += 1.0 / n;
    pb[b[k] - 1] += 1.0 / n;
  }
  double num = 0, den = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double d = std::abs(i - j) / 4.0;
      double wij = w == KappaWeighting::Linear ? d : (i - j) * (i - j) / 16.0;
      num += wij * O[i][j];
      den += wij * pa[i] * pb[j];
    }
  return 1.0 - num / den;
}

std::vector<int> random_ratings(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(1, 5);
  std::vector<int> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

TEST(KappaTest, PerfectAgreementIsExactlyOne) {
  std::vector<int> a{1, 2, 3, 4, 5, 3, 2};
  EXPECT_EQ(metrics::weighted_kappa(a, a, KappaWeighting::Quadratic), 1.0);
  EXPECT_EQ(metrics::weighted_kappa(a, a, KappaWeighting::Linear), 1.0);
}

TEST(KappaTest, ReversedRatingsHandComputed) {
  std::vector<int> a{1, 2, 3, 4, 5};
  std::vector<int> b{5, 4, 3, 2, 1};
  // Quadratic: sum wO = (1 + 1/4 + 0 + 1/4 + 1) / 5 = 0.5; sum wE = 0.25.
  EXPECT_NEAR(metrics::weighted_kappa(a, b, KappaWeighting::Quadratic), -1.0, 1e-12);
  // Linear: sum wO = 0.6, sum wE = 0.4.
  EXPECT_NEAR(metrics::weighted_kappa(a, b, KappaWeighting::Linear), -0.5, 1e-12);
  EXPECT_NEAR(metrics::weighted_kappa(a, b, KappaWeighting::Quadratic), kappa_oracle(a, b, KappaWeighting::Quadratic),
              1e-12);
}

TEST(KappaTest, MatchesOracleOnRandomVectors) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_ratings(rng, 5 + trial);
    auto b = a;
    for (std::size_t i = 0; i < b.size(); i += 3) b[i] = 1 + (b[i] % 5);
    for (auto w : {KappaWeighting::Linear, KappaWeighting::Quadratic})
      EXPECT_NEAR(metrics::weighted_kappa(a, b, w), kappa_oracle(a, b, w), 1e-12);
  }
}

TEST(KappaTest, SymmetricInAnnotators) {
  std::mt19937_64 rng(11);
  auto a = random_ratings(rng, 200);
  auto b = random_ratings(rng, 200);
  for (std::size_t i = 0; i < 100; ++i) b[i] = a[i];
  EXPECT_NEAR(metrics::weighted_kappa(a, b), metrics::weighted_kappa(b, a), 1e-15);
}

TEST(KappaTest, IndependentRatingsNearZero) {
  std::mt19937_64 rng(2024);
  auto a = random_ratings(rng, 10000);
  auto b = random_ratings(rng, 10000);
  EXPECT_LT(std::abs(metrics::weighted_kappa(a, b)), 0.03);
}

TEST(KappaTest, DegenerateAndInvalidInputs) {
  std::vector<int> threes(10, 3);
  EXPECT_THROW(metrics::weighted_kappa(threes, threes), UndefinedStatisticError);
  std::vector<int> a{1, 2}, b{1};
  EXPECT_THROW(metrics::weighted_kappa(a, b), ValidationError);
  std::vector<int> bad{0, 6};
  EXPECT_THROW(metrics::weighted_kappa(bad, bad), ValidationError);
  EXPECT_THROW(metrics::weighted_kappa(std::vector<int>{}, std::vector<int>{}), ValidationError);
}

TEST(KappaTest, AnalysisWrapperDefaultsToQuadratic) {
  std::vector<int> a{1, 2, 3, 4, 5, 5};
  std::vector<int> b{2, 2, 3, 5, 4, 5};
  EXPECT_EQ(mosaig::weighted_kappa(a, b), metrics::weighted_kappa(a, b, KappaWeighting::Quadratic));
}

// Direct summation: exp(1/N sum_i sum_k p_ik log(p_ik / pbar_k)).
double is_oracle(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size(), k = p[0].size();
  std::vector<double> bar(k, 0.0);
  for (const auto& row : p)
    for (std::size_t j = 0; j < k; ++j) bar[j] += row[j] / n;
  double s = 0;
  for (const auto& row : p)
    for (std::size_t j = 0; j < k; ++j)
      if (row[j] > 0) s += row[j] * std::log(row[j] / bar[j]);
  return std::exp(s / n);
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& p) {
  Eigen::MatrixXd m(p.size(), p[0].size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p[0].size(); ++j) m(i, j) = p[i][j];
  return m;
}

TEST(InceptionScoreTest, UniformConditionalsGiveOne) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(20, 10, 0.1);
  EXPECT_NEAR(metrics::inception_score(p), 1.0, 1e-9);
}

TEST(InceptionScoreTest, DistinctOneHotGiveN) {
  for (int n : {2, 5, 17}) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    EXPECT_NEAR(metrics::inception_score(p), static_cast<double>(n), 1e-9);
  }
}

TEST(InceptionScoreTest, MatchesDirectSummation) {
  std::mt19937_64 rng(3);
  std::gamma_distribution<double> g(0.5, 1.0);
  std::vector<std::vector<double>> p(40, std::vector<double>(12));
  for (auto& row : p) {
    double s = 0;
    for (auto& x : row) s += (x = g(rng));
    for (auto& x : row) x /= s;
  }
  EXPECT_NEAR(metrics::inception_score(to_matrix(p)), is_oracle(p), 1e-9);
  // Two splits average the per-half scores.
  std::vector<std::vector<double>> lo(p.begin(), p.begin() + 20), hi(p.begin() + 20, p.end());
  EXPECT_NEAR(metrics::inception_score(to_matrix(p), 2), (is_oracle(lo) + is_oracle(hi)) / 2, 1e-9);
}

TEST(InceptionScoreTest, BoundedByClassCount) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(30, 6);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 6; ++j) p(i, j) = u(rng);
    p.row(i) /= p.row(i).sum();
  }
  const double is = metrics::inception_score(p);
  EXPECT_GE(is, 1.0 - 1e-12);
  EXPECT_LE(is, 6.0 + 1e-12);
}

TEST(InceptionScoreTest, RejectsBadInput) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(4, 3, 0.5);
  EXPECT_THROW(metrics::inception_score(p), InvariantViolation);
  Eigen::MatrixXd neg(2, 2);
  neg << 1.5, -0.5, 0.5, 0.5;
  EXPECT_THROW(metrics::inception_score(neg), InvariantViolation);
  EXPECT_THROW(metrics::inception_score(Eigen::MatrixXd::Identity(1, 3)), ValidationError);
  EXPECT_THROW(metrics::inception_score(Eigen::MatrixXd::Identity(3, 3), 2), ValidationError);
}

double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = x.size();
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i], sy += y[i];
    sxx += x[i] * x[i], syy += y[i] * y[i], sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

TEST(PearsonTest, LinearAndAntiLinear) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{3, 5, 7, 9, 11};
  std::vector<double> z{10, 8, 6, 4, 2};
  EXPECT_NEAR(metrics::pearson(vec(x), vec(y)), 1.0, 1e-12);
  EXPECT_NEAR(metrics::pearson(vec(x), vec(z)), -1.0, 1e-12);
}

TEST(PearsonTest, MatchesDirectFormula) {
  std::vector<double> x{0.31, 0.22, 0.14, 0.25, 0.19};
  std::vector<double> y{45.0, 12.0, 1.5, 9.0, 3.2};
  EXPECT_NEAR(metrics::pearson(vec(x), vec(y)), pearson_oracle(x, y), 1e-12);
}

TEST(PearsonTest, AffineInvariance) {
  std::vector<double> x{0.31, 0.22, 0.14, 0.25, 0.19};
  std::vector<double> y{45.0, 12.0, 1.5, 9.0, 3.2};
  const double r = metrics::pearson(vec(x), vec(y));
  Eigen::VectorXd y2 = (vec(y).array() * 3.5 + 100.0).matrix();
  Eigen::VectorXd x2 = (vec(x).array() * 0.01 - 7.0).matrix();
  EXPECT_NEAR(metrics::pearson(x2, y2), r, 1e-12);
}

TEST(PearsonTest, UndefinedCases) {
  std::vector<double> x{1, 1, 1};
  std::vector<double> y{1, 2, 3};
  EXPECT_THROW(metrics::pearson(vec(x), vec(y)), UndefinedStatisticError);
  EXPECT_THROW(metrics::pearson(vec({1, 2}), vec({2, 3})), ValidationError);
}

TEST(LanguageCorrelationTest, UsesSharedLanguagesOnly) {
  std::map<std::string, double> means{{"en", 0.31}, {"de", 0.22}, {"es", 0.25}, {"hi", 0.14}, {"vi", 0.19}};
  std::map<std::string, double> sizes{{"en", 5.0}, {"de", 3.0}, {"es", 4.0}, {"hi", 1.0}, {"xx", 9.0}};
  EXPECT_NEAR(language_size_correlation(means, sizes),
              pearson_oracle({0.22, 0.31, 0.25, 0.14}, {3.0, 5.0, 4.0, 1.0}), 1e-12);
}

TEST(CosineTest, Basics) {
  Eigen::Vector3d a(1, 0, 0), b(0, 2, 0), c(3, 0, 0);
  EXPECT_EQ(metrics::cosine_similarity(a, b), 0.0);
  EXPECT_NEAR(metrics::cosine_similarity(a, c), 1.0, 1e-15);
  EXPECT_NEAR(metrics::cosine_similarity(a, (-c).eval()), -1.0, 1e-15);
  EXPECT_THROW(metrics::cosine_similarity(a, Eigen::Vector3d::Zero().eval()), InvariantViolation);
}

}  // namespace
}  // namespace mosaig
