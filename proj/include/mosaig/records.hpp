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

#ifndef MOSAIG_RECORDS_HPP_
#define MOSAIG_RECORDS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mosaig/backends.hpp"

namespace mosaig {

enum class CaptionMode { Simple, MultiAgent };

std::string_view to_string(CaptionMode mode);
// Accepts "simple"/"Simple", "multiagent"/"MultiAgent"/"multi-agent".
CaptionMode parse_caption_mode(std::string_view name);
// "S" or "M", as in "flux-M".
std::string_view mode_suffix(CaptionMode mode);

enum class PersonaRole { CountryAgent, AgeGenderAgent, LandmarkAgent, Summarizer };

std::string_view to_string(PersonaRole role);
PersonaRole parse_persona_role(std::string_view name);

enum class TurnKind { InitialDescription, Question, Answer, Refinement, Summary };

std::string_view to_string(TurnKind kind);
TurnKind parse_turn_kind(std::string_view name);

struct Turn {
  PersonaRole speaker = PersonaRole::CountryAgent;
  std::optional<PersonaRole> addressee;  // nullopt addresses everyone
  TurnKind kind = TurnKind::InitialDescription;
  std::string text;
  int round = 0;
  std::vector<ChatMessage> prompt;  // the request that produced `text`

  bool operator==(const Turn&) const = default;
};

struct Transcript {
  std::string spec_id;
  std::vector<Turn> turns;
  std::string final_caption;
  std::size_t token_count = 0;
  std::string backend_fingerprint;
  std::string tokenizer;
  bool truncated = false;
  int summary_attempts = 0;

  bool operator==(const Transcript&) const = default;
};

// One Turn per line followed by a trailer line carrying the caption.
std::string transcript_to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(std::string_view text);

struct ImageRecord {
  std::string spec_id;
  std::string caption;  // post-translation text sent to the generator
  CaptionMode mode = CaptionMode::Simple;
  std::string generator;
  GenParams params;
  std::string path;  // relative to the run directory
  std::string content_hash;

  bool operator==(const ImageRecord&) const = default;
};

std::string image_record_to_json(const ImageRecord& r);
ImageRecord image_record_from_json(std::string_view text);

struct TranslationRecord {
  std::string spec_id;
  CaptionMode mode = CaptionMode::Simple;
  std::string source_text;
  std::string text;
  std::string translator;

  bool operator==(const TranslationRecord&) const = default;
};

std::string translation_to_json(const TranslationRecord& r);
TranslationRecord translation_from_json(std::string_view text);

enum class Metric { Alignment, Quality, Aesthetic, Fairness, Knowledge };

inline constexpr std::array<Metric, 5> kMetrics{Metric::Alignment, Metric::Quality, Metric::Aesthetic,
                                                Metric::Fairness, Metric::Knowledge};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

enum class SwapKind { Gender, Age, Nationality, Landmark };

inline constexpr std::array<SwapKind, 4> kSwapKinds{SwapKind::Gender, SwapKind::Age, SwapKind::Nationality,
                                                    SwapKind::Landmark};

std::string_view to_string(SwapKind kind);
SwapKind parse_swap_kind(std::string_view name);

// Spec id used for set-level statistics such as Quality.
inline constexpr std::string_view kImageSetId = "*";

struct ScoreRecord {
  std::string spec_id;
  Metric metric = Metric::Alignment;
  double value = 0.0;
  std::optional<SwapKind> swap_kind;
  std::optional<std::string> counterpart_spec_id;
  std::optional<std::string> swap_target;  // replacement value, e.g. "Female" or "White House"
  CaptionMode mode = CaptionMode::Simple;
  std::string model;  // e.g. "flux-M"
  std::string scorer_fingerprint;

  bool operator==(const ScoreRecord&) const = default;
};

// Identity of a score for idempotent persistence.
std::string score_key(const ScoreRecord& r);
std::string score_to_json(const ScoreRecord& r);
ScoreRecord score_from_json(std::string_view text);

// Per-image classifier output kept so Quality can be recomputed per slice.
struct ClassificationRecord {
  std::string spec_id;
  CaptionMode mode = CaptionMode::Simple;
  std::string model;
  std::vector<double> probabilities;
  std::string scorer_fingerprint;

  bool operator==(const ClassificationRecord&) const = default;
};

std::string classification_to_json(const ClassificationRecord& r);
ClassificationRecord classification_from_json(std::string_view text);

struct AnnotationTask {
  std::string task_id;
  std::string run_id;
  std::string spec_id;
  CaptionMode mode = CaptionMode::Simple;
  std::string model;
  std::string image_hash;
  std::string caption;
  std::string question_set_version;

  bool operator==(const AnnotationTask&) const = default;
};

std::string task_to_json(const AnnotationTask& t);
AnnotationTask task_from_json(std::string_view text);

struct AnnotationRecord {
  std::string task_id;
  std::string annotator_id;
  int alignment = 0;
  int quality = 0;
  int aesthetics = 0;
  std::string submitted_at;

  // Same ratings for the same (task, annotator); the timestamp is ignored.
  bool same_payload(const AnnotationRecord& o) const {
    return task_id == o.task_id && annotator_id == o.annotator_id && alignment == o.alignment &&
           quality == o.quality && aesthetics == o.aesthetics;
  }
};

std::string annotation_to_json(const AnnotationRecord& r);
AnnotationRecord annotation_from_json(std::string_view text);

}  // namespace mosaig

#endif  // MOSAIG_RECORDS_HPP_
