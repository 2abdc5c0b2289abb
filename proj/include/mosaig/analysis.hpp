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

#ifndef MOSAIG_ANALYSIS_HPP_
#define MOSAIG_ANALYSIS_HPP_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mosaig/matrix.hpp"
#include "mosaig/metrics.hpp"
#include "mosaig/records.hpp"

namespace mosaig {

class RunStore;

enum class Axis { Age, Gender, PersonCountry, LandmarkCountry, Language, CaptionMode, Model };

inline constexpr std::array<Axis, 7> kAxes{Axis::Age,      Axis::Gender,      Axis::PersonCountry, Axis::LandmarkCountry,
                                           Axis::Language, Axis::CaptionMode, Axis::Model};

std::string_view to_string(Axis axis);  // "person-country" etc.
Axis parse_axis(std::string_view name);

// Unspecified axes aggregate.
struct SliceKey {
  std::map<Axis, std::string> dims;

  SliceKey with(Axis axis, std::string value) const;
  bool operator==(const SliceKey&) const = default;
};

struct AggregateReport {
  Metric metric = Metric::Alignment;
  SliceKey slice;
  double mean = 0.0;
  std::size_t count = 0;
  std::optional<double> normalized;

  bool operator==(const AggregateReport&) const = default;
};

// Everything aggregation reads, merged across runs.
struct ScoreTable {
  std::vector<ScoreRecord> scores;
  std::vector<ClassificationRecord> classifications;
  std::unordered_map<std::string, PromptSpec> specs;  // by id
  int splits = 1;                                       // for slice-level Quality

  void add(const RunStore& store);
  static ScoreTable from_store(const RunStore& store);
  // Distinct model labels, sorted.
  std::vector<std::string> models() const;
};

// Value of `axis` for a record; empty when the record is not spec-bound.
std::string axis_value(Axis axis, const PromptSpec* spec, CaptionMode mode, const std::string& model);
bool slice_matches(const SliceKey& slice, const PromptSpec* spec, CaptionMode mode, const std::string& model);

// Mean over matching records; Quality recomputes IS over the slice's image
// set. nullopt for an empty slice (or fewer than 2 images for Quality).
std::optional<AggregateReport> aggregate(const ScoreTable& table, Metric metric, const SliceKey& slice);

enum class Normalization { MinMaxAcrossModels, FixedRange };
std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view name);  // minmax | fixed

struct FixedRanges {
  double quality_ceiling = 10.0;  // IS upper bound
  double delta_ceiling = 1.0;     // fairness / knowledge upper bound
};

// Fills `normalized` per metric group. MinMax needs >= 2 reports per metric
// (ValidationError otherwise); a degenerate range yields 0.5 and a warning.
std::vector<std::string> normalize_scores(std::vector<AggregateReport>& reports, Normalization method,
                                          const FixedRanges& ranges = {});

struct Heatmap {
  Metric metric = Metric::Alignment;
  Axis axis1 = Axis::PersonCountry;
  Axis axis2 = Axis::LandmarkCountry;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::optional<AggregateReport>> cells;  // row-major

  const std::optional<AggregateReport>& at(std::size_t r, std::size_t c) const { return cells[r * cols.size() + c]; }
};

// Axis domain: vocabulary values, or the observed ones for model.
std::vector<std::string> axis_values(Axis axis, const ScoreTable& table);

Heatmap intersection_heatmap(const ScoreTable& table, Metric metric, Axis axis1, Axis axis2,
                             const SliceKey& base = {});
std::string heatmap_to_json(const Heatmap& heatmap);
std::vector<AggregateReport> heatmap_reports(const Heatmap& heatmap);

// Pearson r over the languages present in both maps.
double language_size_correlation(const std::map<std::string, double>& alignment_means,
                                 const std::map<std::string, double>& corpus_sizes);

double weighted_kappa(std::span<const int> ratings_a, std::span<const int> ratings_b,
                      metrics::KappaWeighting weighting = metrics::KappaWeighting::Quadratic);

enum class ReportFormat { CSV, JSON };
std::string export_report(std::span<const AggregateReport> reports, ReportFormat format);
std::vector<AggregateReport> parse_report(std::string_view text, ReportFormat format);

}  // namespace mosaig

#endif  // MOSAIG_ANALYSIS_HPP_
