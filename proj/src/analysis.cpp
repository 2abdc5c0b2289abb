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

#include "mosaig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <json.hpp>

#include "mosaig/errors.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/util.hpp"
#include "mosaig/vocabulary.hpp"

namespace mosaig {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::Age: return "age";
    case Axis::Gender: return "gender";
    case Axis::PersonCountry: return "person-country";
    case Axis::LandmarkCountry: return "landmark-country";
    case Axis::Language: return "language";
    case Axis::CaptionMode: return "caption-mode";
    case Axis::Model: return "model";
  }
  return "?";
}

Axis parse_axis(std::string_view name) {
  auto lower = to_lower(trim(name));
  std::replace(lower.begin(), lower.end(), '_', '-');
  for (auto a : kAxes)
    if (to_string(a) == lower) return a;
  throw ConfigError("unknown slice axis '" + std::string(name) + "'");
}

SliceKey SliceKey::with(Axis axis, std::string value) const {
  SliceKey out = *this;
  out.dims[axis] = std::move(value);
  return out;
}

void ScoreTable::add(const RunStore& store) {
  for (auto& s : store.specs()) specs.emplace(s.id, s);
  auto sc = store.scores();
  scores.insert(scores.end(), sc.begin(), sc.end());
  auto cl = store.classifications();
  classifications.insert(classifications.end(), cl.begin(), cl.end());
}

ScoreTable ScoreTable::from_store(const RunStore& store) {
  ScoreTable t;
  t.add(store);
  return t;
}

std::vector<std::string> ScoreTable::models() const {
  std::set<std::string> seen;
  for (const auto& r : scores) seen.insert(r.model);
  for (const auto& c : classifications) seen.insert(c.model);
  return {seen.begin(), seen.end()};
}

std::string axis_value(Axis axis, const PromptSpec* spec, CaptionMode mode, const std::string& model) {
  switch (axis) {
    case Axis::CaptionMode: return std::string(to_string(mode));
    case Axis::Model: return model;
    default: break;
  }
  if (!spec) return {};
  switch (axis) {
    case Axis::Age: return std::string(to_string(spec->age));
    case Axis::Gender: return std::string(to_string(spec->gender));
    case Axis::PersonCountry: return spec->person_country;
    case Axis::LandmarkCountry: return spec->landmark_country;
    case Axis::Language: return spec->language;
    default: return {};
  }
}

bool slice_matches(const SliceKey& slice, const PromptSpec* spec, CaptionMode mode, const std::string& model) {
  for (const auto& [axis, value] : slice.dims)
    if (axis_value(axis, spec, mode, model) != value) return false;
  return true;
}

namespace {

const PromptSpec* find_spec(const ScoreTable& t, const std::string& id) {
  auto it = t.specs.find(id);
  return it == t.specs.end() ? nullptr : &it->second;
}

}  // namespace

std::optional<AggregateReport> aggregate(const ScoreTable& table, Metric metric, const SliceKey& slice) {
  AggregateReport rep{metric, slice, 0.0, 0, std::nullopt};
  if (metric == Metric::Quality) {
    // Set statistic: never an average of per-image values.
    std::vector<std::vector<double>> rows;
    for (const auto& c : table.classifications)
      if (slice_matches(slice, find_spec(table, c.spec_id), c.mode, c.model)) rows.push_back(c.probabilities);
    const int splits = std::max(1, table.splits);
    if (rows.size() / static_cast<std::size_t>(splits) < 2) return std::nullopt;
    const std::size_t k = rows.front().size();
    Eigen::MatrixXd probs(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != k) throw InvariantViolation("classifier outputs disagree on class count");
      probs.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), rows[i].size());
    }
    rep.mean = metrics::inception_score(probs, splits);
    rep.count = rows.size();
    return rep;
  }
  double sum = 0.0;
  for (const auto& r : table.scores) {
    if (r.metric != metric || r.spec_id == kImageSetId) continue;
    if (!slice_matches(slice, find_spec(table, r.spec_id), r.mode, r.model)) continue;
    sum += r.value;
    rep.count++;
  }
  if (rep.count == 0) return std::nullopt;
  rep.mean = sum / static_cast<double>(rep.count);
  return rep;
}

std::string_view to_string(Normalization n) {
  return n == Normalization::MinMaxAcrossModels ? "minmax" : "fixed";
}

Normalization parse_normalization(std::string_view name) {
  auto lower = to_lower(trim(name));
  if (lower == "minmax" || lower == "min-max" || lower == "minmaxacrossmodels") return Normalization::MinMaxAcrossModels;
  if (lower == "fixed" || lower == "fixedrange" || lower == "fixed-range") return Normalization::FixedRange;
  throw ConfigError("unknown normalization '" + std::string(name) + "' (expected minmax or fixed)");
}

std::vector<std::string> normalize_scores(std::vector<AggregateReport>& reports, Normalization method,
                                          const FixedRanges& ranges) {
  std::vector<std::string> warnings;
  std::map<Metric, std::vector<AggregateReport*>> groups;
  for (auto& r : reports) groups[r.metric].push_back(&r);

  for (auto& [metric, group] : groups) {
    double lo = 0.0;
    double hi = 1.0;
    if (method == Normalization::MinMaxAcrossModels) {
      if (group.size() < 2)
        throw ValidationError("min-max normalization of " + std::string(to_string(metric)) +
                              " needs at least 2 compared reports");
      lo = hi = group.front()->mean;
      for (auto* r : group) {
        lo = std::min(lo, r->mean);
        hi = std::max(hi, r->mean);
      }
    } else {
      switch (metric) {
        case Metric::Alignment: lo = -1.0, hi = 1.0; break;
        case Metric::Aesthetic: lo = 1.0, hi = 10.0; break;
        case Metric::Quality: lo = 1.0, hi = ranges.quality_ceiling; break;
        case Metric::Fairness:
        case Metric::Knowledge: lo = 0.0, hi = ranges.delta_ceiling; break;
      }
    }
    if (!(hi > lo)) {
      warnings.push_back("degenerate range for " + std::string(to_string(metric)) + "; normalized to 0.5");
      for (auto* r : group) r->normalized = 0.5;
      continue;
    }
    for (auto* r : group) r->normalized = std::clamp((r->mean - lo) / (hi - lo), 0.0, 1.0);
  }
  return warnings;
}

std::vector<std::string> axis_values(Axis axis, const ScoreTable& table) {
  const auto& vocab = Vocabulary::seeded();
  std::vector<std::string> out;
  switch (axis) {
    case Axis::Age:
      for (auto a : kAgeGroups) out.emplace_back(to_string(a));
      break;
    case Axis::Gender:
      for (auto g : kGenders) out.emplace_back(to_string(g));
      break;
    case Axis::PersonCountry:
    case Axis::LandmarkCountry: out = vocab.country_names(); break;
    case Axis::Language: out = vocab.language_codes(); break;
    case Axis::CaptionMode:
      out = {std::string(to_string(CaptionMode::Simple)), std::string(to_string(CaptionMode::MultiAgent))};
      break;
    case Axis::Model: out = table.models(); break;
  }
  return out;
}

Heatmap intersection_heatmap(const ScoreTable& table, Metric metric, Axis axis1, Axis axis2, const SliceKey& base) {
  if (axis1 == axis2) throw ValidationError("heatmap axes must differ");
  Heatmap h;
  h.metric = metric;
  h.axis1 = axis1;
  h.axis2 = axis2;
  h.rows = axis_values(axis1, table);
  h.cols = axis_values(axis2, table);
  for (const auto& r : h.rows)
    for (const auto& c : h.cols) h.cells.push_back(aggregate(table, metric, base.with(axis1, r).with(axis2, c)));
  return h;
}

std::string heatmap_to_json(const Heatmap& h) {
  ojson values = ojson::array();
  ojson counts = ojson::array();
  for (std::size_t r = 0; r < h.rows.size(); ++r) {
    ojson vrow = ojson::array();
    ojson crow = ojson::array();
    for (std::size_t c = 0; c < h.cols.size(); ++c) {
      const auto& cell = h.at(r, c);
      vrow.push_back(cell ? ojson(cell->mean) : ojson(nullptr));
      crow.push_back(cell ? cell->count : 0);
    }
    values.push_back(std::move(vrow));
    counts.push_back(std::move(crow));
  }
  ojson j;
  j["metric"] = to_string(h.metric);
  j["axis1"] = to_string(h.axis1);
  j["axis2"] = to_string(h.axis2);
  j["rows"] = h.rows;
  j["cols"] = h.cols;
  j["values"] = std::move(values);
  j["counts"] = std::move(counts);
  return j.dump(2) + "\n";
}

std::vector<AggregateReport> heatmap_reports(const Heatmap& h) {
  std::vector<AggregateReport> out;
  for (const auto& cell : h.cells)
    if (cell) out.push_back(*cell);
  return out;
}

double language_size_correlation(const std::map<std::string, double>& alignment_means,
                                 const std::map<std::string, double>& corpus_sizes) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [lang, mean] : alignment_means) {
    auto it = corpus_sizes.find(lang);
    if (it == corpus_sizes.end()) continue;
    x.push_back(mean);
    y.push_back(it->second);
  }
  return metrics::pearson(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                          Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
}

double weighted_kappa(std::span<const int> ratings_a, std::span<const int> ratings_b,
                      metrics::KappaWeighting weighting) {
  return metrics::weighted_kappa(ratings_a, ratings_b, weighting);
}

// ---- report export ---------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> csv_header() {
  std::vector<std::string> h{"metric"};
  for (auto a : kAxes) h.emplace_back(to_string(a));
  h.insert(h.end(), {"mean", "count", "normalized"});
  return h;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad number '" + s + "' in report");
  }
}

}  // namespace

std::string export_report(std::span<const AggregateReport> reports, ReportFormat format) {
  if (format == ReportFormat::JSON) {
    ojson arr = ojson::array();
    for (const auto& r : reports) {
      ojson j;
      j["metric"] = to_string(r.metric);
      ojson slice = ojson::object();
      for (auto a : kAxes)
        if (auto it = r.slice.dims.find(a); it != r.slice.dims.end()) slice[std::string(to_string(a))] = it->second;
      j["slice"] = std::move(slice);
      j["mean"] = r.mean;
      j["count"] = r.count;
      j["normalized"] = r.normalized ? ojson(*r.normalized) : ojson(nullptr);
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::string out = join(csv_header(), ",") + "\n";
  for (const auto& r : reports) {
    std::vector<std::string> f{std::string(to_string(r.metric))};
    for (auto a : kAxes) {
      auto it = r.slice.dims.find(a);
      f.push_back(it == r.slice.dims.end() ? "" : csv_field(it->second));
    }
    f.push_back(format_double(r.mean));
    f.push_back(std::to_string(r.count));
    f.push_back(r.normalized ? format_double(*r.normalized) : "");
    out += join(f, ",") + "\n";
  }
  return out;
}

std::vector<AggregateReport> parse_report(std::string_view text, ReportFormat format) {
  std::vector<AggregateReport> out;
  if (format == ReportFormat::JSON) {
    ojson arr;
    try {
      arr = ojson::parse(text);
    } catch (const ojson::exception& e) {
      throw ValidationError(std::string("bad report JSON: ") + e.what());
    }
    for (const auto& j : arr) {
      AggregateReport r;
      r.metric = parse_metric(j.at("metric").get<std::string>());
      for (const auto& [k, v] : j.at("slice").items()) r.slice.dims[parse_axis(k)] = v.get<std::string>();
      r.mean = j.at("mean").get<double>();
      r.count = j.at("count").get<std::size_t>();
      if (!j.at("normalized").is_null()) r.normalized = j.at("normalized").get<double>();
      out.push_back(std::move(r));
    }
    return out;
  }
  auto rows = parse_csv(text);
  if (rows.empty() || rows.front() != csv_header()) throw ValidationError("report CSV header mismatch");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != kAxes.size() + 4) throw ValidationError("report CSV row " + std::to_string(i) + " has wrong arity");
    AggregateReport r;
    r.metric = parse_metric(f[0]);
    for (std::size_t a = 0; a < kAxes.size(); ++a)
      if (!f[a + 1].empty()) r.slice.dims[kAxes[a]] = f[a + 1];
    r.mean = parse_number(f[kAxes.size() + 1]);
    r.count = static_cast<std::size_t>(parse_number(f[kAxes.size() + 2]));
    if (!f[kAxes.size() + 3].empty()) r.normalized = parse_number(f[kAxes.size() + 3]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mosaig
