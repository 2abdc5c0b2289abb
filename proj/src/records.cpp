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

#include "mosaig/records.hpp"

#include <json.hpp>

#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

using ojson = nlohmann::ordered_json;

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::array<Enum, N>& values, const char* what) {
  auto lower = to_lower(trim(name));
  for (auto v : values)
    if (to_lower(to_string(v)) == lower) return v;
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

ojson parse_object(std::string_view text, const char* what) {
  try {
    auto j = ojson::parse(text);
    if (!j.is_object()) throw ProtocolError(std::string(what) + " record is not an object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed ") + what + " record: " + e.what());
  }
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed ") + what + " record: " + e.what());
  }
}

ojson params_to_json(const GenParams& p) {
  ojson j;
  j["guidance_scale"] = p.guidance_scale;
  j["steps"] = p.inference_steps;
  j["seed"] = p.seed;
  j["width"] = p.width;
  j["height"] = p.height;
  return j;
}

GenParams params_from_json(const ojson& j) {
  GenParams p;
  p.guidance_scale = j.at("guidance_scale").get<double>();
  p.inference_steps = j.at("steps").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.width = j.at("width").get<int>();
  p.height = j.at("height").get<int>();
  return p;
}

}  // namespace

std::string_view to_string(CaptionMode mode) { return mode == CaptionMode::Simple ? "Simple" : "MultiAgent"; }

CaptionMode parse_caption_mode(std::string_view name) {
  auto lower = to_lower(trim(name));
  if (lower == "simple" || lower == "s") return CaptionMode::Simple;
  if (lower == "multiagent" || lower == "multi-agent" || lower == "m") return CaptionMode::MultiAgent;
  throw ConfigError("unknown caption mode '" + std::string(name) + "'");
}

std::string_view mode_suffix(CaptionMode mode) { return mode == CaptionMode::Simple ? "S" : "M"; }

std::string_view to_string(PersonaRole role) {
  switch (role) {
    case PersonaRole::CountryAgent: return "CountryAgent";
    case PersonaRole::AgeGenderAgent: return "AgeGenderAgent";
    case PersonaRole::LandmarkAgent: return "LandmarkAgent";
    case PersonaRole::Summarizer: return "Summarizer";
  }
  return "?";
}

PersonaRole parse_persona_role(std::string_view name) {
  static constexpr std::array kRoles{PersonaRole::CountryAgent, PersonaRole::AgeGenderAgent,
                                     PersonaRole::LandmarkAgent, PersonaRole::Summarizer};
  return parse_enum(name, kRoles, "persona role");
}

std::string_view to_string(TurnKind kind) {
  switch (kind) {
    case TurnKind::InitialDescription: return "InitialDescription";
    case TurnKind::Question: return "Question";
    case TurnKind::Answer: return "Answer";
    case TurnKind::Refinement: return "Refinement";
    case TurnKind::Summary: return "Summary";
  }
  return "?";
}

TurnKind parse_turn_kind(std::string_view name) {
  static constexpr std::array kKinds{TurnKind::InitialDescription, TurnKind::Question, TurnKind::Answer,
                                     TurnKind::Refinement, TurnKind::Summary};
  return parse_enum(name, kKinds, "turn kind");
}

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  for (const auto& turn : t.turns) {
    ojson j;
    j["type"] = "turn";
    j["speaker"] = to_string(turn.speaker);
    j["addressee"] = turn.addressee ? ojson(to_string(*turn.addressee)) : ojson("all");
    j["kind"] = to_string(turn.kind);
    j["round"] = turn.round;
    j["text"] = turn.text;
    j["prompt"] = ojson::array();
    for (const auto& m : turn.prompt) j["prompt"].push_back({{"role", m.role}, {"text", m.text}});
    out += j.dump();
    out += '\n';
  }
  ojson trailer;
  trailer["type"] = "trailer";
  trailer["spec_id"] = t.spec_id;
  trailer["final_caption"] = t.final_caption;
  trailer["token_count"] = t.token_count;
  trailer["backend_fingerprint"] = t.backend_fingerprint;
  trailer["tokenizer"] = t.tokenizer;
  trailer["truncated"] = t.truncated;
  trailer["summary_attempts"] = t.summary_attempts;
  out += trailer.dump();
  out += '\n';
  return out;
}

Transcript transcript_from_jsonl(std::string_view text) {
  return guarded("transcript", [&] {
    Transcript t;
    bool have_trailer = false;
    for (const auto& line : split(text, '\n')) {
      if (trim(line).empty()) continue;
      if (have_trailer) throw ProtocolError("transcript has records after its trailer");
      auto j = parse_object(line, "transcript");
      auto type = j.at("type").get<std::string>();
      if (type == "turn") {
        Turn turn;
        turn.speaker = parse_persona_role(j.at("speaker").get<std::string>());
        auto addressee = j.at("addressee").get<std::string>();
        if (addressee != "all") turn.addressee = parse_persona_role(addressee);
        turn.kind = parse_turn_kind(j.at("kind").get<std::string>());
        turn.round = j.at("round").get<int>();
        turn.text = j.at("text").get<std::string>();
        for (const auto& m : j.at("prompt"))
          turn.prompt.push_back({m.at("role").get<std::string>(), m.at("text").get<std::string>()});
        t.turns.push_back(std::move(turn));
      } else if (type == "trailer") {
        t.spec_id = j.at("spec_id").get<std::string>();
        t.final_caption = j.at("final_caption").get<std::string>();
        t.token_count = j.at("token_count").get<std::size_t>();
        t.backend_fingerprint = j.at("backend_fingerprint").get<std::string>();
        t.tokenizer = j.at("tokenizer").get<std::string>();
        t.truncated = j.at("truncated").get<bool>();
        t.summary_attempts = j.at("summary_attempts").get<int>();
        have_trailer = true;
      } else {
        throw ProtocolError("unknown transcript record type '" + type + "'");
      }
    }
    if (!have_trailer) throw ProtocolError("transcript lacks a trailer record");
    return t;
  });
}

std::string image_record_to_json(const ImageRecord& r) {
  ojson j;
  j["spec_id"] = r.spec_id;
  j["caption"] = r.caption;
  j["mode"] = to_string(r.mode);
  j["generator"] = r.generator;
  j["params"] = params_to_json(r.params);
  j["path"] = r.path;
  j["content_hash"] = r.content_hash;
  return j.dump();
}

ImageRecord image_record_from_json(std::string_view text) {
  auto j = parse_object(text, "image");
  return guarded("image", [&] {
    ImageRecord r;
    r.spec_id = j.at("spec_id").get<std::string>();
    r.caption = j.at("caption").get<std::string>();
    r.mode = parse_caption_mode(j.at("mode").get<std::string>());
    r.generator = j.at("generator").get<std::string>();
    r.params = params_from_json(j.at("params"));
    r.path = j.at("path").get<std::string>();
    r.content_hash = j.at("content_hash").get<std::string>();
    return r;
  });
}

std::string translation_to_json(const TranslationRecord& r) {
  ojson j;
  j["spec_id"] = r.spec_id;
  j["mode"] = to_string(r.mode);
  j["source_text"] = r.source_text;
  j["text"] = r.text;
  j["translator"] = r.translator;
  return j.dump();
}

TranslationRecord translation_from_json(std::string_view text) {
  auto j = parse_object(text, "translation");
  return guarded("translation", [&] {
    TranslationRecord r;
    r.spec_id = j.at("spec_id").get<std::string>();
    r.mode = parse_caption_mode(j.at("mode").get<std::string>());
    r.source_text = j.at("source_text").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.translator = j.at("translator").get<std::string>();
    return r;
  });
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Alignment: return "Alignment";
    case Metric::Quality: return "Quality";
    case Metric::Aesthetic: return "Aesthetic";
    case Metric::Fairness: return "Fairness";
    case Metric::Knowledge: return "Knowledge";
  }
  return "?";
}

Metric parse_metric(std::string_view name) { return parse_enum(name, kMetrics, "metric"); }

std::string_view to_string(SwapKind kind) {
  switch (kind) {
    case SwapKind::Gender: return "Gender";
    case SwapKind::Age: return "Age";
    case SwapKind::Nationality: return "Nationality";
    case SwapKind::Landmark: return "Landmark";
  }
  return "?";
}

SwapKind parse_swap_kind(std::string_view name) { return parse_enum(name, kSwapKinds, "swap kind"); }

std::string score_key(const ScoreRecord& r) {
  std::string key = r.spec_id;
  key += '|';
  key += to_string(r.metric);
  key += '|';
  key += to_string(r.mode);
  key += '|';
  key += r.model;
  key += '|';
  if (r.swap_kind) key += to_string(*r.swap_kind);
  key += '|';
  if (r.swap_target) key += *r.swap_target;
  return key;
}

std::string score_to_json(const ScoreRecord& r) {
  ojson j;
  j["spec_id"] = r.spec_id;
  j["metric"] = to_string(r.metric);
  j["value"] = r.value;
  if (r.swap_kind) j["swap_kind"] = to_string(*r.swap_kind);
  if (r.counterpart_spec_id) j["counterpart_spec_id"] = *r.counterpart_spec_id;
  if (r.swap_target) j["swap_target"] = *r.swap_target;
  j["mode"] = to_string(r.mode);
  j["model"] = r.model;
  j["scorer_fingerprint"] = r.scorer_fingerprint;
  return j.dump();
}

ScoreRecord score_from_json(std::string_view text) {
  auto j = parse_object(text, "score");
  return guarded("score", [&] {
    ScoreRecord r;
    r.spec_id = j.at("spec_id").get<std::string>();
    r.metric = parse_metric(j.at("metric").get<std::string>());
    r.value = j.at("value").get<double>();
    if (j.contains("swap_kind")) r.swap_kind = parse_swap_kind(j["swap_kind"].get<std::string>());
    if (j.contains("counterpart_spec_id")) r.counterpart_spec_id = j["counterpart_spec_id"].get<std::string>();
    if (j.contains("swap_target")) r.swap_target = j["swap_target"].get<std::string>();
    r.mode = parse_caption_mode(j.at("mode").get<std::string>());
    r.model = j.at("model").get<std::string>();
    r.scorer_fingerprint = j.at("scorer_fingerprint").get<std::string>();
    return r;
  });
}

std::string classification_to_json(const ClassificationRecord& r) {
  ojson j;
  j["spec_id"] = r.spec_id;
  j["mode"] = to_string(r.mode);
  j["model"] = r.model;
  j["probabilities"] = r.probabilities;
  j["scorer_fingerprint"] = r.scorer_fingerprint;
  return j.dump();
}

ClassificationRecord classification_from_json(std::string_view text) {
  auto j = parse_object(text, "classification");
  return guarded("classification", [&] {
    ClassificationRecord r;
    r.spec_id = j.at("spec_id").get<std::string>();
    r.mode = parse_caption_mode(j.at("mode").get<std::string>());
    r.model = j.at("model").get<std::string>();
    r.probabilities = j.at("probabilities").get<std::vector<double>>();
    r.scorer_fingerprint = j.at("scorer_fingerprint").get<std::string>();
    return r;
  });
}

std::string task_to_json(const AnnotationTask& t) {
  ojson j;
  j["task_id"] = t.task_id;
  j["run_id"] = t.run_id;
  j["spec_id"] = t.spec_id;
  j["mode"] = to_string(t.mode);
  j["model"] = t.model;
  j["image_hash"] = t.image_hash;
  j["caption"] = t.caption;
  j["question_set_version"] = t.question_set_version;
  return j.dump();
}

AnnotationTask task_from_json(std::string_view text) {
  auto j = parse_object(text, "task");
  return guarded("task", [&] {
    AnnotationTask t;
    t.task_id = j.at("task_id").get<std::string>();
    t.run_id = j.at("run_id").get<std::string>();
    t.spec_id = j.at("spec_id").get<std::string>();
    t.mode = parse_caption_mode(j.at("mode").get<std::string>());
    t.model = j.at("model").get<std::string>();
    t.image_hash = j.at("image_hash").get<std::string>();
    t.caption = j.at("caption").get<std::string>();
    t.question_set_version = j.at("question_set_version").get<std::string>();
    return t;
  });
}

std::string annotation_to_json(const AnnotationRecord& r) {
  ojson j;
  j["task_id"] = r.task_id;
  j["annotator_id"] = r.annotator_id;
  j["alignment"] = r.alignment;
  j["quality"] = r.quality;
  j["aesthetics"] = r.aesthetics;
  j["submitted_at"] = r.submitted_at;
  return j.dump();
}

AnnotationRecord annotation_from_json(std::string_view text) {
  auto j = parse_object(text, "annotation");
  return guarded("annotation", [&] {
    AnnotationRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.annotator_id = j.at("annotator_id").get<std::string>();
    r.alignment = j.at("alignment").get<int>();
    r.quality = j.at("quality").get<int>();
    r.aesthetics = j.at("aesthetics").get<int>();
    r.submitted_at = j.value("submitted_at", "");
    return r;
  });
}

}  // namespace mosaig
