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

#ifndef MOSAIG_RUNSTORE_HPP_
#define MOSAIG_RUNSTORE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mosaig/matrix.hpp"
#include "mosaig/records.hpp"

namespace mosaig {

struct RunManifest {
  std::string run_id;
  std::string created_at;
  std::map<std::string, std::string> config;
  std::map<std::string, std::size_t> counts;
};

enum class Stage { Captions, Translations, Images, Alignment };

// Flat-file store for one run:
//   <root>/<run-id>/{manifest.json, specs.jsonl, transcripts/, images/,
//                    translations.jsonl, scores.jsonl, classifications.jsonl,
//                    annotation_tasks.jsonl, annotations.jsonl}
//
// Records are append-only. Whole-file records go through write-temp-then-
// rename; JSONL records are appended with one write per line and a trailing
// partial line (from a crash mid-append) is ignored on read. Re-putting an
// identical record is a no-op that performs no write; re-putting different
// content under the same key throws ConflictError.
class RunStore {
 public:
  // Creates the run if absent. An existing run must carry the same config
  // snapshot, otherwise ConflictError.
  static RunStore open(const std::filesystem::path& root, const std::string& run_id,
                       const std::map<std::string, std::string>& config);
  // Throws NotFoundError when the run does not exist.
  static RunStore open_existing(const std::filesystem::path& root, const std::string& run_id);
  static bool exists(const std::filesystem::path& root, const std::string& run_id);

  RunStore(RunStore&&) noexcept;
  RunStore& operator=(RunStore&&) noexcept;
  ~RunStore();

  const RunManifest& manifest() const { return manifest_; }
  const std::filesystem::path& dir() const { return dir_; }
  // Recomputes per-stage counts and rewrites the manifest only if they changed.
  bool refresh_counts();

  bool put_specs(std::span<const PromptSpec> specs);
  // Specs with agentic captions joined from persisted transcripts.
  std::vector<PromptSpec> specs() const;

  // Keyed by transcript.spec_id.
  bool put_transcript(const Transcript& transcript);
  std::optional<Transcript> get_transcript(const std::string& spec_id) const;

  bool put_translation(const TranslationRecord& record);
  std::optional<TranslationRecord> get_translation(const std::string& spec_id, CaptionMode mode) const;

  // Writes the PNG blob, then the record; fills path and content_hash.
  bool put_image(ImageRecord record, std::span<const std::uint8_t> png);
  std::optional<ImageRecord> get_image(const std::string& spec_id, CaptionMode mode) const;
  std::vector<ImageRecord> images() const;
  // Reads the blob and verifies its hash; CorruptionError names the file.
  std::vector<std::uint8_t> read_image_bytes(const ImageRecord& record) const;
  std::optional<ImageRecord> find_image_by_hash(const std::string& content_hash) const;

  bool put_score(const ScoreRecord& record);
  std::vector<ScoreRecord> scores() const;
  bool has_score(const std::string& key) const;

  bool put_classification(const ClassificationRecord& record);
  std::vector<ClassificationRecord> classifications() const;

  bool put_tasks(std::span<const AnnotationTask> tasks);
  std::vector<AnnotationTask> tasks() const;

  // Returns true if stored, false for an identical duplicate.
  bool put_annotation(const AnnotationRecord& record);
  std::vector<AnnotationRecord> annotations() const;

  // Spec ids (in matrix order) lacking a record at the given stage. Captions
  // are keyed by the English base tuple; translations are only required for
  // non-English specs.
  std::vector<std::string> missing(Stage stage, CaptionMode mode) const;

 private:
  struct Caches;

  RunStore(std::filesystem::path dir, RunManifest manifest);
  std::mutex& spec_lock(const std::string& spec_id) const;
  void load_caches() const;
  void write_manifest() const;

  std::filesystem::path dir_;
  RunManifest manifest_;
  std::unique_ptr<Caches> caches_;
};

std::string to_string(Stage stage);

}  // namespace mosaig

#endif  // MOSAIG_RUNSTORE_HPP_
