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

#include "mosaig/runstore.hpp"

#include <algorithm>
#include <set>
#include <json.hpp>

#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::size_t kLockStripes = 64;

// Complete lines only: a fragment after the last newline is a torn append.
std::vector<std::string> read_jsonl(const fs::path& path) {
  std::vector<std::string> out;
  auto text = read_file(path);
  if (!text) return out;
  auto end = text->rfind('\n');
  if (end == std::string::npos) return out;
  for (auto& line : split(std::string_view(*text).substr(0, end), '\n'))
    if (!trim(line).empty()) out.push_back(std::move(line));
  return out;
}

// Drops a torn trailing fragment so the next append starts on a fresh line.
void repair_jsonl(const fs::path& path) {
  auto text = read_file(path);
  if (!text || text->empty() || text->back() == '\n') return;
  auto end = text->rfind('\n');
  fs::resize_file(path, end == std::string::npos ? 0 : end + 1);
}

RunManifest manifest_from_json(const std::string& text, const fs::path& path) {
  try {
    auto j = ojson::parse(text);
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) m.config[k] = v.get<std::string>();
    if (j.contains("counts"))
      for (const auto& [k, v] : j["counts"].items()) m.counts[k] = v.get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(path.string(), std::string("unreadable manifest: ") + e.what());
  }
}

std::string manifest_to_json(const RunManifest& m) {
  ojson j;
  j["run_id"] = m.run_id;
  j["created_at"] = m.created_at;
  j["config"] = ojson::object();
  for (const auto& [k, v] : m.config) j["config"][k] = v;
  j["counts"] = ojson::object();
  for (const auto& [k, v] : m.counts) j["counts"][k] = v;
  return j.dump(2) + "\n";
}

std::string image_stem(const std::string& spec_id, CaptionMode mode) {
  return spec_id + "." + std::string(mode_suffix(mode));
}

void check_id(const std::string& id) {
  if (id.empty() || id.find_first_of("/\\\0", 0, 3) != std::string::npos || id == "." || id == "..")
    throw ValidationError("invalid record id '" + id + "'");
}

}  // namespace

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Captions: return "captions";
    case Stage::Translations: return "translations";
    case Stage::Images: return "images";
    case Stage::Alignment: return "alignment";
  }
  return "?";
}

struct RunStore::Caches {
  mutable std::mutex mutex;
  mutable bool loaded = false;
  mutable std::vector<ScoreRecord> scores;
  mutable std::unordered_map<std::string, std::size_t> score_index;
  mutable std::map<std::string, TranslationRecord> translations;
  mutable std::vector<ClassificationRecord> classifications;
  mutable std::unordered_map<std::string, std::size_t> classification_index;
  mutable std::vector<AnnotationRecord> annotations;
  mutable std::unordered_map<std::string, std::size_t> annotation_index;
  mutable std::array<std::mutex, kLockStripes> spec_locks;
};

RunStore::RunStore(fs::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)), caches_(std::make_unique<Caches>()) {}

RunStore::RunStore(RunStore&&) noexcept = default;
RunStore& RunStore::operator=(RunStore&&) noexcept = default;
RunStore::~RunStore() = default;

bool RunStore::exists(const fs::path& root, const std::string& run_id) {
  return fs::exists(root / run_id / "manifest.json");
}

RunStore RunStore::open(const fs::path& root, const std::string& run_id,
                        const std::map<std::string, std::string>& config) {
  check_id(run_id);
  if (exists(root, run_id)) {
    auto store = open_existing(root, run_id);
    if (store.manifest().config != config)
      throw ConflictError("run '" + run_id + "' exists with a different configuration");
    return store;
  }
  auto dir = root / run_id;
  fs::create_directories(dir / "transcripts");
  fs::create_directories(dir / "images");
  RunManifest m;
  m.run_id = run_id;
  m.created_at = utc_timestamp();
  m.config = config;
  RunStore store(dir, std::move(m));
  store.write_manifest();
  return store;
}

RunStore RunStore::open_existing(const fs::path& root, const std::string& run_id) {
  check_id(run_id);
  auto dir = root / run_id;
  auto text = read_file(dir / "manifest.json");
  if (!text) throw NotFoundError("run '" + run_id + "' not found under " + root.string());
  fs::create_directories(dir / "transcripts");
  fs::create_directories(dir / "images");
  return RunStore(dir, manifest_from_json(*text, dir / "manifest.json"));
}

void RunStore::write_manifest() const { write_atomic(dir_ / "manifest.json", manifest_to_json(manifest_)); }

std::mutex& RunStore::spec_lock(const std::string& spec_id) const {
  return caches_->spec_locks[std::hash<std::string>{}(spec_id) % kLockStripes];
}

void RunStore::load_caches() const {
  auto& c = *caches_;
  if (c.loaded) return;
  for (const char* name : {"scores.jsonl", "translations.jsonl", "classifications.jsonl", "annotations.jsonl"})
    repair_jsonl(dir_ / name);
  for (const auto& line : read_jsonl(dir_ / "scores.jsonl")) {
    auto r = score_from_json(line);
    auto key = score_key(r);
    if (c.score_index.count(key)) continue;
    c.score_index[key] = c.scores.size();
    c.scores.push_back(std::move(r));
  }
  for (const auto& line : read_jsonl(dir_ / "translations.jsonl")) {
    auto r = translation_from_json(line);
    c.translations.emplace(r.spec_id + "|" + std::string(to_string(r.mode)), std::move(r));
  }
  for (const auto& line : read_jsonl(dir_ / "classifications.jsonl")) {
    auto r = classification_from_json(line);
    auto key = r.spec_id + "|" + std::string(to_string(r.mode)) + "|" + r.model;
    if (c.classification_index.count(key)) continue;
    c.classification_index[key] = c.classifications.size();
    c.classifications.push_back(std::move(r));
  }
  for (const auto& line : read_jsonl(dir_ / "annotations.jsonl")) {
    auto r = annotation_from_json(line);
    auto key = r.task_id + "|" + r.annotator_id;
    if (c.annotation_index.count(key)) continue;
    c.annotation_index[key] = c.annotations.size();
    c.annotations.push_back(std::move(r));
  }
  c.loaded = true;
}

bool RunStore::refresh_counts() {
  std::map<std::string, std::size_t> counts;
  auto all = specs();
  counts["specs"] = all.size();
  std::size_t transcripts = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "transcripts"))
    if (e.path().extension() == ".jsonl") ++transcripts;
  counts["transcripts"] = transcripts;
  counts["images"] = images().size();
  {
    std::lock_guard lock(caches_->mutex);
    load_caches();
    counts["translations"] = caches_->translations.size();
    counts["scores"] = caches_->scores.size();
    counts["annotations"] = caches_->annotations.size();
  }
  if (counts == manifest_.counts) return false;
  manifest_.counts = std::move(counts);
  write_manifest();
  return true;
}

bool RunStore::put_specs(std::span<const PromptSpec> specs) {
  std::string text = export_matrix_jsonl(specs);
  auto path = dir_ / "specs.jsonl";
  std::lock_guard lock(caches_->mutex);
  if (auto existing = read_file(path)) {
    if (*existing == text) return false;
    throw ConflictError("specs.jsonl already holds a different matrix");
  }
  write_atomic(path, text);
  return true;
}

std::vector<PromptSpec> RunStore::specs() const {
  auto text = read_file(dir_ / "specs.jsonl");
  if (!text) return {};
  auto out = parse_matrix_jsonl(*text);
  std::map<std::string, std::optional<std::string>> captions;
  for (auto& s : out) {
    auto base = base_spec_id(s);
    auto it = captions.find(base);
    if (it == captions.end()) {
      auto t = get_transcript(base);
      it = captions.emplace(base, t ? std::optional(t->final_caption) : std::nullopt).first;
    }
    s.agentic_caption = it->second;
  }
  return out;
}

bool RunStore::put_transcript(const Transcript& transcript) {
  check_id(transcript.spec_id);
  auto path = dir_ / "transcripts" / (transcript.spec_id + ".jsonl");
  auto text = transcript_to_jsonl(transcript);
  std::lock_guard lock(spec_lock(transcript.spec_id));
  if (auto existing = read_file(path)) {
    if (*existing == text) return false;
    throw ConflictError("transcript " + transcript.spec_id + " already persisted with different content");
  }
  write_atomic(path, text);
  return true;
}

std::optional<Transcript> RunStore::get_transcript(const std::string& spec_id) const {
  auto path = dir_ / "transcripts" / (spec_id + ".jsonl");
  auto text = read_file(path);
  if (!text) return std::nullopt;
  try {
    return transcript_from_jsonl(*text);
  } catch (const ProtocolError& e) {
    throw CorruptionError(path.string(), e.what());
  }
}

bool RunStore::put_translation(const TranslationRecord& record) {
  check_id(record.spec_id);
  auto key = record.spec_id + "|" + std::string(to_string(record.mode));
  std::lock_guard lock(caches_->mutex);
  load_caches();
  auto it = caches_->translations.find(key);
  if (it != caches_->translations.end()) {
    if (it->second == record) return false;
    throw ConflictError("translation " + key + " already persisted with different content");
  }
  append_line(dir_ / "translations.jsonl", translation_to_json(record));
  caches_->translations.emplace(key, record);
  return true;
}

std::optional<TranslationRecord> RunStore::get_translation(const std::string& spec_id, CaptionMode mode) const {
  std::lock_guard lock(caches_->mutex);
  load_caches();
  auto it = caches_->translations.find(spec_id + "|" + std::string(to_string(mode)));
  if (it == caches_->translations.end()) return std::nullopt;
  return it->second;
}

bool RunStore::put_image(ImageRecord record, std::span<const std::uint8_t> png) {
  check_id(record.spec_id);
  auto stem = image_stem(record.spec_id, record.mode);
  record.path = "images/" + stem + ".png";
  record.content_hash = sha256_hex(png);
  auto meta_path = dir_ / "images" / (stem + ".json");
  auto text = image_record_to_json(record);
  std::lock_guard lock(spec_lock(record.spec_id));
  if (auto existing = read_file(meta_path)) {
    if (*existing == text) return false;
    throw ConflictError("image " + stem + " already persisted with different content");
  }
  // Blob first: a record never points at a missing or partial blob.
  write_atomic(dir_ / record.path, png);
  write_atomic(meta_path, text);
  return true;
}

std::optional<ImageRecord> RunStore::get_image(const std::string& spec_id, CaptionMode mode) const {
  auto path = dir_ / "images" / (image_stem(spec_id, mode) + ".json");
  auto text = read_file(path);
  if (!text) return std::nullopt;
  try {
    return image_record_from_json(*text);
  } catch (const ProtocolError& e) {
    throw CorruptionError(path.string(), e.what());
  }
}

std::vector<ImageRecord> RunStore::images() const {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir_ / "images"))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<ImageRecord> out;
  for (const auto& p : paths) {
    auto text = read_file(p);
    if (!text) continue;
    try {
      out.push_back(image_record_from_json(*text));
    } catch (const ProtocolError& e) {
      throw CorruptionError(p.string(), e.what());
    }
  }
  return out;
}

std::vector<std::uint8_t> RunStore::read_image_bytes(const ImageRecord& record) const {
  auto path = dir_ / record.path;
  if (!fs::exists(path)) throw CorruptionError(path.string(), "image blob is missing");
  auto bytes = read_binary(path);
  if (sha256_hex(bytes) != record.content_hash) throw CorruptionError(path.string(), "content hash mismatch");
  return bytes;
}

std::optional<ImageRecord> RunStore::find_image_by_hash(const std::string& content_hash) const {
  for (auto& r : images())
    if (r.content_hash == content_hash) return r;
  return std::nullopt;
}

bool RunStore::put_score(const ScoreRecord& record) {
  auto key = score_key(record);
  std::lock_guard lock(caches_->mutex);
  load_caches();
  auto it = caches_->score_index.find(key);
  if (it != caches_->score_index.end()) {
    if (caches_->scores[it->second] == record) return false;
    throw ConflictError("score " + key + " already persisted with a different value");
  }
  append_line(dir_ / "scores.jsonl", score_to_json(record));
  caches_->score_index[key] = caches_->scores.size();
  caches_->scores.push_back(record);
  return true;
}

std::vector<ScoreRecord> RunStore::scores() const {
  std::lock_guard lock(caches_->mutex);
  load_caches();
  return caches_->scores;
}

bool RunStore::has_score(const std::string& key) const {
  std::lock_guard lock(caches_->mutex);
  load_caches();
  return caches_->score_index.count(key) > 0;
}

bool RunStore::put_classification(const ClassificationRecord& record) {
  auto key = record.spec_id + "|" + std::string(to_string(record.mode)) + "|" + record.model;
  std::lock_guard lock(caches_->mutex);
  load_caches();
  auto it = caches_->classification_index.find(key);
  if (it != caches_->classification_index.end()) {
    if (caches_->classifications[it->second] == record) return false;
    throw ConflictError("classification " + key + " already persisted with different content");
  }
  append_line(dir_ / "classifications.jsonl", classification_to_json(record));
  caches_->classification_index[key] = caches_->classifications.size();
  caches_->classifications.push_back(record);
  return true;
}

std::vector<ClassificationRecord> RunStore::classifications() const {
  std::lock_guard lock(caches_->mutex);
  load_caches();
  return caches_->classifications;
}

bool RunStore::put_tasks(std::span<const AnnotationTask> tasks) {
  std::string text;
  for (const auto& t : tasks) text += task_to_json(t) + "\n";
  auto path = dir_ / "annotation_tasks.jsonl";
  std::lock_guard lock(caches_->mutex);
  if (auto existing = read_file(path)) {
    if (*existing == text) return false;
    throw ConflictError("annotation tasks already created with different content");
  }
  write_atomic(path, text);
  return true;
}

std::vector<AnnotationTask> RunStore::tasks() const {
  std::vector<AnnotationTask> out;
  for (const auto& line : read_jsonl(dir_ / "annotation_tasks.jsonl")) out.push_back(task_from_json(line));
  return out;
}

bool RunStore::put_annotation(const AnnotationRecord& record) {
  auto key = record.task_id + "|" + record.annotator_id;
  std::lock_guard lock(caches_->mutex);
  load_caches();
  auto it = caches_->annotation_index.find(key);
  if (it != caches_->annotation_index.end()) {
    if (caches_->annotations[it->second].same_payload(record)) return false;
    throw ConflictError("annotation " + key + " already submitted with different ratings");
  }
  append_line(dir_ / "annotations.jsonl", annotation_to_json(record));
  caches_->annotation_index[key] = caches_->annotations.size();
  caches_->annotations.push_back(record);
  return true;
}

std::vector<AnnotationRecord> RunStore::annotations() const {
  std::lock_guard lock(caches_->mutex);
  load_caches();
  return caches_->annotations;
}

std::vector<std::string> RunStore::missing(Stage stage, CaptionMode mode) const {
  std::vector<std::string> out;
  auto text = read_file(dir_ / "specs.jsonl");
  if (!text) return out;
  auto all = parse_matrix_jsonl(*text);
  switch (stage) {
    case Stage::Captions:
      if (mode == CaptionMode::Simple) return out;
      for (const auto& s : all)
        if (!fs::exists(dir_ / "transcripts" / (base_spec_id(s) + ".jsonl"))) out.push_back(s.id);
      return out;
    case Stage::Translations:
      for (const auto& s : all)
        if (s.language != "en" && !get_translation(s.id, mode)) out.push_back(s.id);
      return out;
    case Stage::Images:
      for (const auto& s : all)
        if (!fs::exists(dir_ / "images" / (image_stem(s.id, mode) + ".json"))) out.push_back(s.id);
      return out;
    case Stage::Alignment: {
      std::lock_guard lock(caches_->mutex);
      load_caches();
      std::set<std::string> scored;
      for (const auto& r : caches_->scores)
        if (r.metric == Metric::Alignment && r.mode == mode) scored.insert(r.spec_id);
      for (const auto& s : all)
        if (!scored.count(s.id)) out.push_back(s.id);
      return out;
    }
  }
  return out;
}

}  // namespace mosaig
