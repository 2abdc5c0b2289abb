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

#include "mosaig/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <set>

#include "mosaig/annotation.hpp"
#include "mosaig/captioner.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/image.hpp"
#include "mosaig/remote.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/scoring.hpp"
#include "mosaig/tokenizer.hpp"
#include "mosaig/util.hpp"
#include "mosaig/vocabulary.hpp"

namespace mosaig {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---- RunConfig -------------------------------------------------------------

namespace {

std::vector<std::string> list_value(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& part : split(value, ','))
    if (auto t = trim(part); !t.empty()) out.emplace_back(t);
  return out;
}

bool bool_value(const std::string& key, const std::string& value) {
  auto v = to_lower(trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

long long int_value(const std::string& key, const std::string& value, long long lo) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size() || v < lo) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer >= " + std::to_string(lo) + ", got '" + value + "'");
  }
}

double real_value(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

const std::set<std::string> kEndpointRoles{"chat", "image", "translate", "scorer"};

bool has_endpoint(const RunConfig& c, const std::string& role) {
  if (c.endpoints.count(role + "_url")) return true;
  std::string env = "MOSAIG_" + role + "_URL";
  std::transform(env.begin(), env.end(), env.begin(), [](unsigned char ch) { return std::toupper(ch); });
  return std::getenv(env.c_str()) != nullptr;
}

EndpointConfig endpoint_for(const RunConfig& c, const std::string& role) {
  auto it = c.endpoints.find(role + "_url");
  if (it == c.endpoints.end()) return EndpointConfig::from_env(role);
  EndpointConfig e;
  e.url = it->second;
  if (auto t = c.endpoints.find(role + "_token"); t != c.endpoints.end()) e.token = t->second;
  return e;
}

}  // namespace

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  for (const auto& [k, v] : parse_key_values(text)) c.set(k, v);
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "preset") {
    preset = to_lower(trim(value));
  } else if (key == "mode") {
    mode = parse_caption_mode(value);
  } else if (key == "languages") {
    languages = list_value(value);
  } else if (key == "rounds") {
    rounds = static_cast<int>(int_value(key, value, 1));
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(int_value(key, value, 0));
  } else if (key == "normalization" || key == "normalize") {
    normalization = parse_normalization(value);
  } else if (key == "stub") {
    stub = bool_value(key, value);
  } else if (key == "workers") {
    workers = static_cast<int>(int_value(key, value, 1));
  } else if (key == "cross_cultural_only") {
    cross_cultural_only = bool_value(key, value);
  } else if (key == "ages") {
    filter.ages.clear();
    for (const auto& v : list_value(value)) filter.ages.push_back(parse_age_group(v));
  } else if (key == "genders") {
    filter.genders.clear();
    for (const auto& v : list_value(value)) filter.genders.push_back(parse_gender(v));
  } else if (key == "countries") {
    filter.countries = list_value(value);
  } else if (key == "landmarks") {
    filter.landmarks = list_value(value);
  } else if (key == "tokenizer") {
    tokenizer = std::string(trim(value));
  } else if (key == "model") {
    model = std::string(trim(value));
  } else if (key == "is_splits") {
    is_splits = static_cast<int>(int_value(key, value, 1));
  } else if (key == "quality_ceiling") {
    ranges.quality_ceiling = real_value(key, value);
  } else if (key == "delta_ceiling") {
    ranges.delta_ceiling = real_value(key, value);
  } else if (key == "corpus_sizes") {
    corpus_sizes.clear();
    for (const auto& item : list_value(value)) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("corpus_sizes: expected lang:size, got '" + item + "'");
      corpus_sizes[std::string(trim(item.substr(0, colon)))] = real_value(key, std::string(trim(item.substr(colon + 1))));
    }
  } else if (key == "compare") {
    compare = list_value(value);
  } else if (key == "annotation_sample") {
    annotation_sample = static_cast<std::size_t>(int_value(key, value, 1));
  } else if (key == "annotation_axes") {
    annotation_axes.clear();
    for (const auto& v : list_value(value)) annotation_axes.push_back(parse_axis(v));
  } else if (key == "annotators") {
    annotators = list_value(value);
  } else if (key == "annotation_token") {
    annotation_token = value;
  } else {
    auto us = key.rfind('_');
    if (us != std::string::npos && kEndpointRoles.count(key.substr(0, us)) &&
        (key.substr(us) == "_url" || key.substr(us) == "_token")) {
      endpoints[key] = value;
      return;
    }
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  const auto& p = generator_preset(preset);
  const auto& vocab = Vocabulary::seeded();
  if (languages.empty()) throw ConfigError("at least one language is required");
  for (const auto& lang : languages) {
    vocab.language(lang);
    if (std::find(p.languages.begin(), p.languages.end(), lang) == p.languages.end())
      throw ConfigError("preset '" + preset + "' does not accept language '" + lang + "' (supported: " +
                        join(p.languages, ",") + ")");
  }
  make_tokenizer(tokenizer);
  if (!stub) {
    if (mode == CaptionMode::MultiAgent && !has_endpoint(*this, "chat"))
      throw ConfigError("multiagent mode requires a chat backend (set chat_url or MOSAIG_CHAT_URL, or use --stub)");
    bool non_english = std::any_of(languages.begin(), languages.end(), [](const auto& l) { return l != "en"; });
    if (non_english && !has_endpoint(*this, "translate"))
      throw ConfigError("non-English languages require a translator (set translate_url or use --stub)");
  }
}

std::map<std::string, std::string> RunConfig::snapshot() const {
  std::map<std::string, std::string> s;
  s["preset"] = preset;
  s["mode"] = std::string(to_string(mode));
  s["languages"] = join(languages, ",");
  s["rounds"] = std::to_string(rounds);
  s["seed"] = std::to_string(seed);
  s["stub"] = stub ? "true" : "false";
  s["cross_cultural_only"] = cross_cultural_only ? "true" : "false";
  std::vector<std::string> v;
  for (auto a : filter.ages) v.emplace_back(to_string(a));
  s["ages"] = join(v, ",");
  v.clear();
  for (auto g : filter.genders) v.emplace_back(to_string(g));
  s["genders"] = join(v, ",");
  s["countries"] = join(filter.countries, ",");
  s["landmarks"] = join(filter.landmarks, ",");
  s["tokenizer"] = tokenizer;
  s["model"] = model_label();
  return s;
}

std::string RunConfig::model_label() const {
  return model.empty() ? preset + "-" + std::string(mode_suffix(mode)) : model;
}

// ---- Pipeline --------------------------------------------------------------

struct Pipeline::State {
  Backends backends;
  std::optional<RunStore> store;
  std::deque<RunStore> others;
  std::unique_ptr<Tokenizer> tokenizer;
};

Pipeline::Pipeline(fs::path root, std::string run_id, RunConfig config)
    : root_(std::move(root)), run_id_(std::move(run_id)), config_(std::move(config)),
      state_(std::make_unique<State>()) {}

Pipeline::~Pipeline() = default;

void Pipeline::set_backends(Backends backends) { state_->backends = std::move(backends); }

ChatModel& Pipeline::chat() {
  auto& b = state_->backends.chat;
  if (!b) b = config_.stub ? stub_chat(demo_chat_script()) : remote_chat(endpoint_for(config_, "chat"));
  return *b;
}

ImageGenerator& Pipeline::generator() {
  auto& b = state_->backends.generator;
  if (!b) {
    const auto& p = generator_preset(config_.preset);
    if (config_.stub)
      b = std::make_unique<StubImageGenerator>(p.name, p.languages);
    else
      b = remote_image(endpoint_for(config_, "image"), p.languages);
  }
  return *b;
}

Translator& Pipeline::translator() {
  auto& b = state_->backends.translator;
  if (!b) {
    if (config_.stub)
      b = std::make_unique<StubTranslator>();
    else
      b = remote_translate(endpoint_for(config_, "translate"));
  }
  return *b;
}

ScoreBackend& Pipeline::scorer() {
  auto& b = state_->backends.scorer;
  if (!b) b = config_.stub ? stub_scorer(config_.seed) : remote_scorer(endpoint_for(config_, "scorer"));
  return *b;
}

namespace {

ojson failures_json(const std::vector<std::pair<std::string, std::string>>& failures) {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < failures.size() && i < 20; ++i)
    arr.push_back({{"id", failures[i].first}, {"error", failures[i].second}});
  return arr;
}

std::string english_caption(const PromptSpec& spec, CaptionMode mode) {
  if (mode == CaptionMode::Simple) return spec.simple_caption;
  if (!spec.agentic_caption) throw IncompleteMatrixError({spec.id}, "run `mosaig caption` first");
  return *spec.agentic_caption;
}

bool write_if_changed(const fs::path& path, const std::string& text) {
  if (auto existing = read_file(path); existing && *existing == text) return false;
  write_atomic(path, text);
  return true;
}

}  // namespace

namespace {

RunStore& open_store(std::optional<RunStore>& slot, const fs::path& root, const std::string& run_id,
                     const RunConfig& config, bool create) {
  if (slot) return *slot;
  if (!create && !RunStore::exists(root, run_id))
    throw IncompleteMatrixError({}, "run '" + run_id + "' does not exist; run `mosaig enumerate` first");
  slot.emplace(RunStore::open(root, run_id, config.snapshot()));
  return *slot;
}

void require_complete(const RunStore& store, Stage stage, CaptionMode mode, const std::string& command) {
  auto missing = store.missing(stage, mode);
  if (!missing.empty()) throw IncompleteMatrixError(std::move(missing), "run `mosaig " + command + "` first");
}

void require_specs(const RunStore& store) {
  if (store.specs().empty()) throw IncompleteMatrixError({}, "the run has no prompt matrix; run `mosaig enumerate` first");
}

}  // namespace

std::string Pipeline::enumerate() {
  config_.validate();
  auto specs = enumerate_matrix(Vocabulary::seeded(), config_.languages, config_.cross_cultural_only, config_.filter);
  if (specs.empty()) throw ConfigError("the matrix filters admit no prompt specs");
  auto& store = open_store(state_->store, root_, run_id_, config_, true);
  const bool wrote = store.put_specs(specs);
  store.refresh_counts();
  ojson j{{"command", "enumerate"}, {"run", run_id_}, {"specs", specs.size()}, {"written", wrote ? 1 : 0}, {"failed", 0}};
  return j.dump();
}

std::string Pipeline::caption() {
  config_.validate();
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  auto specs = store.specs();
  ojson j{{"command", "caption"}, {"run", run_id_}, {"mode", to_string(config_.mode)}};
  if (config_.mode == CaptionMode::Simple) {
    // Template captions are part of the matrix.
    j["written"] = 0;
    j["skipped"] = specs.size();
    j["failed"] = 0;
    return j.dump();
  }
  if (!state_->tokenizer) state_->tokenizer = make_tokenizer(config_.tokenizer);
  CaptionerOptions opts;
  opts.rounds = config_.rounds;
  Captioner captioner(PromptPack::seeded(), *state_->tokenizer, opts);
  auto progress = caption_matrix(specs, chat(), store, captioner, config_.workers);
  store.refresh_counts();
  j["written"] = progress.completed;
  j["skipped"] = progress.skipped;
  j["failed"] = progress.failed;
  if (progress.failed) j["failures"] = failures_json(progress.failures);
  return j.dump();
}

std::string Pipeline::translate() {
  config_.validate();
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  require_complete(store, Stage::Captions, config_.mode, "caption");
  auto specs = store.specs();
  std::vector<const PromptSpec*> todo;
  std::size_t skipped = 0;
  for (const auto& s : specs) {
    if (s.language == "en") continue;
    if (store.get_translation(s.id, config_.mode))
      ++skipped;
    else
      todo.push_back(&s);
  }
  std::mutex mu;
  std::size_t written = 0;
  std::vector<std::pair<std::string, std::string>> failures;
  if (!todo.empty()) {
    auto& tr = translator();
    parallel_for(todo.size(), config_.workers, [&](std::size_t i) {
      const auto& spec = *todo[i];
      try {
        TranslationRecord r;
        r.spec_id = spec.id;
        r.mode = config_.mode;
        r.source_text = english_caption(spec, config_.mode);
        r.text = tr.translate(r.source_text, "en", spec.language);
        r.translator = tr.fingerprint();
        const bool w = store.put_translation(r);
        std::lock_guard lock(mu);
        written += w;
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        failures.emplace_back(spec.id, e.what());
      }
    });
  }
  store.refresh_counts();
  ojson j{{"command", "translate"}, {"run", run_id_},       {"written", written},
          {"skipped", skipped},     {"failed", failures.size()}};
  if (!failures.empty()) j["failures"] = failures_json(failures);
  return j.dump();
}

std::string Pipeline::generate() {
  config_.validate();
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  require_complete(store, Stage::Captions, config_.mode, "caption");
  require_complete(store, Stage::Translations, config_.mode, "translate");
  const auto& preset = generator_preset(config_.preset);
  auto specs = store.specs();
  std::vector<const PromptSpec*> todo;
  std::size_t skipped = 0;
  for (const auto& s : specs) {
    if (store.get_image(s.id, config_.mode))
      ++skipped;
    else
      todo.push_back(&s);
  }
  std::mutex mu;
  std::size_t written = 0;
  std::vector<std::pair<std::string, std::string>> failures;
  if (!todo.empty()) {
    auto& gen = generator();
    for (const auto& lang : config_.languages)
      if (!gen.supports(lang)) throw ConfigError("generator " + gen.fingerprint() + " does not accept '" + lang + "'");
    parallel_for(todo.size(), config_.workers, [&](std::size_t i) {
      const auto& spec = *todo[i];
      try {
        std::string text = english_caption(spec, config_.mode);
        if (spec.language != "en") {
          auto tr = store.get_translation(spec.id, config_.mode);
          if (!tr) throw IncompleteMatrixError({spec.id}, "run `mosaig translate` first");
          text = tr->text;
        }
        Image img = gen.generate(text, preset.params);
        if (img.width != preset.params.width || img.height != preset.params.height)
          throw ProtocolError("generator returned " + std::to_string(img.width) + "x" + std::to_string(img.height));
        ImageRecord r;
        r.spec_id = spec.id;
        r.caption = text;
        r.mode = config_.mode;
        r.generator = gen.fingerprint();
        r.params = preset.params;
        const bool w = store.put_image(r, encode_png(img));
        std::lock_guard lock(mu);
        written += w;
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        failures.emplace_back(spec.id, e.what());
      }
    });
  }
  store.refresh_counts();
  ojson j{{"command", "generate"}, {"run", run_id_},       {"written", written},
          {"skipped", skipped},    {"failed", failures.size()}};
  if (!failures.empty()) j["failures"] = failures_json(failures);
  return j.dump();
}

namespace {

std::string score_summary(const char* command, const std::string& run, const ScoreSummary& s) {
  ojson j{{"command", command},    {"run", run},         {"written", s.written},
          {"skipped", s.skipped},  {"failed", s.failed}, {"inapplicable", s.inapplicable}};
  if (s.failed) j["failures"] = failures_json(s.failures);
  return j.dump();
}

}  // namespace

std::string Pipeline::score() {
  config_.validate();
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  require_complete(store, Stage::Images, config_.mode, "generate");
  ScoreRunOptions opts;
  opts.metrics = {Metric::Alignment, Metric::Quality, Metric::Aesthetic};
  opts.mode = config_.mode;
  opts.model = config_.model_label();
  opts.splits = config_.is_splits;
  opts.workers = config_.workers;
  auto s = score_run(store, scorer(), opts);
  store.refresh_counts();
  return score_summary("score", run_id_, s);
}

std::string Pipeline::swap_score() {
  config_.validate();
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  require_complete(store, Stage::Images, config_.mode, "generate");
  ScoreRunOptions opts;
  opts.metrics = {Metric::Fairness, Metric::Knowledge};
  opts.mode = config_.mode;
  opts.model = config_.model_label();
  opts.workers = config_.workers;
  bool non_english =
      std::any_of(config_.languages.begin(), config_.languages.end(), [](const auto& l) { return l != "en"; });
  if (non_english) opts.translator = &translator();
  auto s = score_run(store, scorer(), opts);
  store.refresh_counts();
  return score_summary("swap-score", run_id_, s);
}

std::string Pipeline::report() {
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  require_complete(store, Stage::Alignment, config_.mode, "score");
  ScoreTable table;
  table.splits = config_.is_splits;
  table.add(store);
  std::vector<std::string> runs{run_id_};
  for (const auto& id : config_.compare) {
    if (id == run_id_) continue;
    table.add(RunStore::open_existing(root_, id));
    runs.push_back(id);
  }
  const auto models = table.models();
  std::vector<std::string> warnings;

  // Model comparison, normalized per metric.
  std::vector<AggregateReport> comparison;
  for (auto metric : kMetrics) {
    std::vector<AggregateReport> group;
    for (const auto& m : models)
      if (auto r = aggregate(table, metric, SliceKey{}.with(Axis::Model, m))) group.push_back(*r);
    if (group.empty()) continue;
    try {
      auto w = normalize_scores(group, config_.normalization, config_.ranges);
      warnings.insert(warnings.end(), w.begin(), w.end());
    } catch (const ValidationError& e) {
      warnings.push_back(e.what());
    }
    comparison.insert(comparison.end(), group.begin(), group.end());
  }

  // Single-axis ablations per model.
  std::vector<AggregateReport> ablations;
  const std::array<Axis, 5> ablation_axes{Axis::Age, Axis::Gender, Axis::PersonCountry, Axis::LandmarkCountry,
                                          Axis::Language};
  for (const auto& m : models)
    for (auto axis : ablation_axes)
      for (const auto& value : axis_values(axis, table))
        for (auto metric : kMetrics)
          if (auto r = aggregate(table, metric, SliceKey{}.with(Axis::Model, m).with(axis, value)))
            ablations.push_back(*r);

  // Intersections.
  const std::array<std::pair<Axis, Axis>, 3> pairs{{{Axis::Age, Axis::Gender},
                                                    {Axis::PersonCountry, Axis::LandmarkCountry},
                                                    {Axis::Language, Axis::PersonCountry}}};
  ojson heatmaps = ojson::array();
  std::vector<AggregateReport> cells;
  for (const auto& m : models)
    for (const auto& [a1, a2] : pairs)
      for (auto metric : kMetrics) {
        auto h = intersection_heatmap(table, metric, a1, a2, SliceKey{}.with(Axis::Model, m));
        auto hj = ojson::parse(heatmap_to_json(h));
        hj["model"] = m;
        heatmaps.push_back(std::move(hj));
        auto rs = heatmap_reports(h);
        cells.insert(cells.end(), rs.begin(), rs.end());
      }

  ojson summary{{"runs", runs}, {"models", models}, {"normalization", to_string(config_.normalization)}};
  if (!config_.corpus_sizes.empty()) {
    std::map<std::string, double> means;
    for (const auto& lang : Vocabulary::seeded().language_codes())
      if (auto r = aggregate(table, Metric::Alignment,
                             SliceKey{}.with(Axis::Model, config_.model_label()).with(Axis::Language, lang)))
        means[lang] = r->mean;
    try {
      summary["language_size_correlation"] = language_size_correlation(means, config_.corpus_sizes);
    } catch (const Error& e) {
      warnings.push_back(std::string("language-size correlation: ") + e.what());
    }
  }
  summary["warnings"] = warnings;

  fs::create_directories(report_dir());
  const std::vector<std::pair<std::string, std::string>> files{
      {"comparison.csv", export_report(comparison, ReportFormat::CSV)},
      {"comparison.json", export_report(comparison, ReportFormat::JSON)},
      {"ablations.csv", export_report(ablations, ReportFormat::CSV)},
      {"ablations.json", export_report(ablations, ReportFormat::JSON)},
      {"heatmaps.csv", export_report(cells, ReportFormat::CSV)},
      {"heatmaps.json", heatmaps.dump(2) + "\n"},
      {"summary.json", summary.dump(2) + "\n"},
  };
  std::size_t written = 0;
  for (const auto& [name, text] : files) written += write_if_changed(report_dir() / name, text);
  ojson j{{"command", "report"},
          {"run", run_id_},
          {"models", models},
          {"normalization", to_string(config_.normalization)},
          {"files", files.size()},
          {"written", written},
          {"warnings", warnings.size()},
          {"failed", 0}};
  return j.dump();
}

std::string Pipeline::serve_annotation(int port, std::ostream* announce) {
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  require_specs(store);
  require_complete(store, Stage::Images, config_.mode, "generate");
  std::vector<const RunStore*> image_stores;
  std::vector<AnnotationSource> sources{{&store, config_.model_label()}};
  for (const auto& id : config_.compare) {
    if (id == run_id_) continue;
    auto& other = state_->others.emplace_back(RunStore::open_existing(root_, id));
    require_complete(other, Stage::Images, parse_caption_mode(other.manifest().config.at("mode")), "generate");
    sources.push_back({&other, other.manifest().config.at("model")});
    image_stores.push_back(&other);
  }
  bool created = false;
  if (store.tasks().empty()) {
    TaskSampleOptions opts;
    opts.sample_size = config_.annotation_sample;
    opts.axes = config_.annotation_axes;
    opts.seed = config_.seed;
    auto tasks = create_tasks(sources, opts);
    created = store.put_tasks(tasks);
  }
  AnnotationService service(store, image_stores, config_.seed, config_.annotators);
  ojson j{{"command", "serve-annotation"}, {"run", run_id_}, {"tasks", service.task_count()},
          {"created", created ? 1 : 0}};
  if (port >= 0) {
    AnnotationServer server(service, config_.annotation_token);
    j["port"] = server.bind("127.0.0.1", port);
    if (announce) *announce << j.dump() << std::endl;
    server.serve();
  }
  return j.dump();
}

std::string Pipeline::agreement() {
  auto& store = open_store(state_->store, root_, run_id_, config_, false);
  auto records = store.annotations();
  if (records.empty())
    throw IncompleteMatrixError({}, "no annotations recorded; collect them with `mosaig serve-annotation` first");
  ojson pairs = ojson::array();
  for (const auto& p : pairwise_agreement(records)) {
    ojson o{{"a", p.annotator_a}, {"b", p.annotator_b}, {"paired", p.paired}};
    const std::array<const char*, 3> keys{"alignment", "quality", "aesthetics"};
    for (std::size_t q = 0; q < 3; ++q) o[keys[q]] = p.kappa[q] ? ojson(*p.kappa[q]) : ojson(nullptr);
    pairs.push_back(std::move(o));
  }
  fs::create_directories(report_dir());
  ojson doc{{"weighting", "quadratic"}, {"pairs", pairs}};
  const bool wrote = write_if_changed(report_dir() / "agreement.json", doc.dump(2) + "\n");
  ojson j{{"command", "agreement"}, {"run", run_id_}, {"pairs", pairs}, {"written", wrote ? 1 : 0}, {"failed", 0}};
  return j.dump();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IncompleteMatrixError*>(&e)) return kExitIncomplete;
  if (dynamic_cast<const BackendError*>(&e) || dynamic_cast<const ProtocolError*>(&e)) return kExitBackend;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ConflictError*>(&e) || dynamic_cast<const NotFoundError*>(&e))
    return kExitConfig;
  return kExitFailure;
}

int Pipeline::run(std::string_view command, std::ostream& out, std::ostream& err) {
  std::string summary;
  try {
    if (command == "enumerate") summary = enumerate();
    else if (command == "caption") summary = caption();
    else if (command == "translate") summary = translate();
    else if (command == "generate") summary = generate();
    else if (command == "score") summary = score();
    else if (command == "swap-score") summary = swap_score();
    else if (command == "report") summary = report();
    else if (command == "agreement") summary = agreement();
    else throw ConfigError("unknown command '" + std::string(command) + "'");
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << "error: " << e.what() << "\n";
    out << ojson{{"command", command}, {"run", run_id_}, {"status", "error"}, {"exit", code}, {"error", e.what()}}.dump()
        << std::endl;
    return code;
  }
  out << summary << std::endl;
  auto j = ojson::parse(summary);
  if (j.contains("failed") && j["failed"].get<std::size_t>() > 0) return kExitBackend;
  return kExitOk;
}

}  // namespace mosaig
