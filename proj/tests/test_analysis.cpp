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

#include <json.hpp>
#include <random>

#include "mosaig/analysis.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/metrics.hpp"
#include "test_support.hpp"

namespace mosaig {
namespace {

ScoreRecord rec(const std::string& spec, Metric m, double v, const std::string& model = "a-S") {
  ScoreRecord r;
  r.spec_id = spec;
  r.metric = m;
  r.value = v;
  r.model = model;
  return r;
}

// Full English matrix with seeded random alignment for two models.
ScoreTable random_table(std::uint64_t seed) {
  ScoreTable t;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.2, 0.6);
  std::vector<std::string> langs{"en"};
  for (auto& s : enumerate_matrix(Vocabulary::seeded(), langs, false)) {
    for (const char* model : {"a-S", "b-S"}) t.scores.push_back(rec(s.id, Metric::Alignment, u(rng), model));
    t.specs.emplace(s.id, s);
  }
  return t;
}

TEST(Aggregate, MeanOfTwoRecords) {
  ScoreTable t;
  auto specs = testing::mini_matrix();
  for (auto& s : specs) t.specs.emplace(s.id, s);
  t.scores = {rec(specs[0].id, Metric::Alignment, 0.2), rec(specs[1].id, Metric::Alignment, 0.4)};
  auto r = aggregate(t, Metric::Alignment, {});
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->mean, 0.3, 1e-12);
  EXPECT_EQ(r->count, 2u);
  EXPECT_FALSE(aggregate(t, Metric::Fairness, {}));
  EXPECT_FALSE(aggregate(t, Metric::Alignment, SliceKey{}.with(Axis::Model, "zzz")));
}

TEST(Aggregate, SliceMatchesBruteForce) {
  auto t = random_table(7);
  for (const char* g : {"Female", "Male"}) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& r : t.scores)
      if (std::string(to_string(t.specs.at(r.spec_id).gender)) == g) {
        sum += r.value;
        ++n;
      }
    auto a = aggregate(t, Metric::Alignment, SliceKey{}.with(Axis::Gender, g));
    ASSERT_TRUE(a);
    EXPECT_EQ(a->count, n);
    EXPECT_NEAR(a->mean, sum / n, 1e-12);
  }
  auto one = aggregate(t, Metric::Alignment, SliceKey{}.with(Axis::Gender, "Female").with(Axis::Model, "b-S"));
  ASSERT_TRUE(one);
  EXPECT_EQ(one->count, 375u);
}

TEST(Aggregate, PartitionsRecombineToTotal) {
  auto t = random_table(11);
  auto total = *aggregate(t, Metric::Alignment, {});
  for (Axis axis : {Axis::Age, Axis::Gender, Axis::PersonCountry, Axis::LandmarkCountry, Axis::Model}) {
    std::size_t n = 0;
    double weighted = 0;
    for (const auto& v : axis_values(axis, t)) {
      auto part = aggregate(t, Metric::Alignment, SliceKey{}.with(axis, v));
      if (!part) continue;
      n += part->count;
      weighted += part->mean * static_cast<double>(part->count);
    }
    EXPECT_EQ(n, total.count) << to_string(axis);
    EXPECT_NEAR(weighted / n, total.mean, 1e-12);
  }
}

TEST(Aggregate, QualityIsRecomputedOverTheSlice) {
  ScoreTable t;
  auto specs = testing::mini_matrix();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<std::vector<double>> female;
  for (auto& s : specs) {
    t.specs.emplace(s.id, s);
    std::vector<double> p(6);
    double z = 0;
    for (auto& x : p) z += (x = u(rng));
    for (auto& x : p) x /= z;
    t.classifications.push_back({s.id, CaptionMode::Simple, "a-S", p, "stub"});
    if (s.gender == Gender::Female) female.push_back(p);
  }
  // A set-level record must not leak into other aggregates.
  t.scores.push_back(rec(std::string(kImageSetId), Metric::Quality, 123.0));
  t.scores.push_back(rec(std::string(kImageSetId), Metric::Alignment, 99.0));
  t.scores.push_back(rec(specs[0].id, Metric::Alignment, 0.5));

  auto q = aggregate(t, Metric::Quality, SliceKey{}.with(Axis::Gender, "Female"));
  ASSERT_TRUE(q);
  EXPECT_EQ(q->count, 6u);
  Eigen::MatrixXd m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = female[i][j];
  EXPECT_NEAR(q->mean, metrics::inception_score(m, 1), 1e-12);
  EXPECT_NEAR(aggregate(t, Metric::Alignment, {})->mean, 0.5, 1e-12);
  // One image is not a set.
  EXPECT_FALSE(aggregate(t, Metric::Quality, SliceKey{}.with(Axis::Gender, "Female").with(Axis::LandmarkCountry,
                                                                                         "India")
                                                   .with(Axis::PersonCountry, "Germany")));
}

AggregateReport report(Metric m, const std::string& model, double mean) {
  return {m, SliceKey{}.with(Axis::Model, model), mean, 10, std::nullopt};
}

TEST(Normalize, MinMaxMapsExtremesToUnitInterval) {
  std::vector<AggregateReport> rs{report(Metric::Aesthetic, "a", 0.45), report(Metric::Aesthetic, "b", 0.65),
                                  report(Metric::Aesthetic, "c", 0.5)};
  EXPECT_TRUE(normalize_scores(rs, Normalization::MinMaxAcrossModels).empty());
  EXPECT_EQ(*rs[0].normalized, 0.0);
  EXPECT_EQ(*rs[1].normalized, 1.0);
  EXPECT_NEAR(*rs[2].normalized, 0.25, 1e-12);
}

TEST(Normalize, MinMaxPreservesOrder) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<AggregateReport> rs;
    for (int i = 0; i < 6; ++i) rs.push_back(report(Metric::Alignment, "m" + std::to_string(i), u(rng)));
    normalize_scores(rs, Normalization::MinMaxAcrossModels);
    for (auto& a : rs)
      for (auto& b : rs) {
        if (a.mean < b.mean) EXPECT_LT(*a.normalized, *b.normalized);
        EXPECT_GE(*a.normalized, 0.0);
        EXPECT_LE(*a.normalized, 1.0);
      }
  }
}

TEST(Normalize, MinMaxNeedsTwoReportsAndHandlesTies) {
  std::vector<AggregateReport> one{report(Metric::Alignment, "a", 0.3)};
  EXPECT_THROW(normalize_scores(one, Normalization::MinMaxAcrossModels), ValidationError);
  std::vector<AggregateReport> tied{report(Metric::Alignment, "a", 0.3), report(Metric::Alignment, "b", 0.3)};
  auto warnings = normalize_scores(tied, Normalization::MinMaxAcrossModels);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(*tied[0].normalized, 0.5);
  EXPECT_EQ(*tied[1].normalized, 0.5);
}

TEST(Normalize, FixedRanges) {
  std::vector<AggregateReport> rs{report(Metric::Alignment, "a", 0.0), report(Metric::Aesthetic, "a", 5.5),
                                  report(Metric::Quality, "a", 1.0), report(Metric::Fairness, "a", 2.0),
                                  report(Metric::Knowledge, "a", -0.1)};
  normalize_scores(rs, Normalization::FixedRange);
  EXPECT_NEAR(*rs[0].normalized, 0.5, 1e-12);
  EXPECT_NEAR(*rs[1].normalized, 0.5, 1e-12);
  EXPECT_NEAR(*rs[2].normalized, 0.0, 1e-12);
  EXPECT_NEAR(*rs[3].normalized, 1.0, 1e-12);  // clamped
  EXPECT_NEAR(*rs[4].normalized, 0.0, 1e-12);
  EXPECT_EQ(parse_normalization("minmax"), Normalization::MinMaxAcrossModels);
  EXPECT_EQ(parse_normalization("fixed"), Normalization::FixedRange);
  EXPECT_THROW(parse_normalization("zscore"), ConfigError);
}

TEST(Heatmap, CellsEqualSliceAggregates) {
  auto t = random_table(13);
  auto base = SliceKey{}.with(Axis::Model, "a-S");
  auto h = intersection_heatmap(t, Metric::Alignment, Axis::PersonCountry, Axis::LandmarkCountry, base);
  ASSERT_EQ(h.rows.size(), 5u);
  ASSERT_EQ(h.cols.size(), 5u);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      auto expect =
          aggregate(t, Metric::Alignment, base.with(Axis::PersonCountry, h.rows[r]).with(Axis::LandmarkCountry, h.cols[c]));
      ASSERT_TRUE(h.at(r, c));
      EXPECT_EQ(h.at(r, c)->mean, expect->mean);
      EXPECT_EQ(h.at(r, c)->count, 30u);
    }
  auto rows = heatmap_reports(h);
  EXPECT_EQ(rows.size(), 25u);
  EXPECT_EQ(parse_report(export_report(rows, ReportFormat::CSV), ReportFormat::CSV), rows);
  auto json = nlohmann::json::parse(heatmap_to_json(h));
  EXPECT_EQ(json["values"].size(), 5u);
  EXPECT_EQ(json["axis1"], "person-country");
}

TEST(Heatmap, AbsentCellsAreEmpty) {
  auto t = random_table(1);
  auto h = intersection_heatmap(t, Metric::Fairness, Axis::Age, Axis::Gender);
  EXPECT_EQ(h.cells.size(), 6u);
  for (const auto& c : h.cells) EXPECT_FALSE(c);
  EXPECT_TRUE(heatmap_reports(h).empty());
}

TEST(Export, RoundTripsBothFormats) {
  std::vector<AggregateReport> rs{report(Metric::Alignment, "a, \"quoted\"", 0.1 + 0.2),
                                  {Metric::Knowledge, SliceKey{}.with(Axis::Gender, "Male").with(Axis::Language, "de"),
                                   -1.0 / 3.0, 7, 0.25}};
  for (auto f : {ReportFormat::CSV, ReportFormat::JSON}) EXPECT_EQ(parse_report(export_report(rs, f), f), rs);
}

TEST(Export, EmptySetIsHeaderOnly) {
  auto csv = export_report({}, ReportFormat::CSV);
  EXPECT_EQ(csv, "metric,age,gender,person-country,landmark-country,language,caption-mode,model,mean,count,normalized\n");
  EXPECT_TRUE(parse_report(csv, ReportFormat::CSV).empty());
  EXPECT_TRUE(parse_report(export_report({}, ReportFormat::JSON), ReportFormat::JSON).empty());
}

TEST(Analysis, LanguageSizeCorrelation) {
  std::map<std::string, double> means{{"en", 0.3}, {"de", 0.25}, {"hi", 0.1}, {"x", 9}};
  std::map<std::string, double> sizes{{"en", 100}, {"de", 50}, {"hi", 10}};
  Eigen::Vector3d a(0.25, 0.3, 0.1), b(50, 100, 10);  // map order: de, en, hi
  EXPECT_NEAR(language_size_correlation(means, sizes), metrics::pearson(a, b), 1e-12);
}

TEST(Analysis, AxisNames) {
  for (Axis a : kAxes) EXPECT_EQ(parse_axis(to_string(a)), a);
  EXPECT_EQ(parse_axis("person_country"), Axis::PersonCountry);
  EXPECT_THROW(parse_axis("colour"), ConfigError);
}

}  // namespace
}  // namespace mosaig
