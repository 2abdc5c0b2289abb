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

#ifndef MOSAIG_MATRIX_HPP_
#define MOSAIG_MATRIX_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosaig/vocabulary.hpp"

namespace mosaig {

// One cell of the demographic prompt matrix.
struct PromptSpec {
  std::string id;
  AgeGroup age = AgeGroup::Child;
  Gender gender = Gender::Female;
  std::string person_country;
  std::string demonym;
  std::string landmark;
  std::string landmark_country;
  std::string language;  // caption language code
  std::string simple_caption;
  std::optional<std::string> agentic_caption;

  bool operator==(const PromptSpec&) const = default;
};

// Restricts enumeration to a sub-matrix. Empty vectors mean "all values".
struct MatrixFilter {
  std::vector<AgeGroup> ages;
  std::vector<Gender> genders;
  std::vector<std::string> countries;
  std::vector<std::string> landmarks;
};

// Enumerates age x gender x person-country x landmark x language in
// lexicographic tuple order. Throws ConfigError on an empty or unknown
// language list or unknown filter values.
std::vector<PromptSpec> enumerate_matrix(const Vocabulary& vocab, std::span<const std::string> languages,
                                         bool cross_cultural_only, const MatrixFilter& filter = {});

// "girl", "boy", "woman", "man", "elderly woman", "elderly man".
std::string_view age_gender_noun(AgeGroup age, Gender gender);

std::string render_simple_caption(const PromptSpec& spec);

// First 16 hex digits of SHA-256 over the canonical tuple text.
std::string spec_id(AgeGroup age, Gender gender, std::string_view person_country, std::string_view landmark,
                    std::string_view language);
std::string spec_id(const PromptSpec& spec);
// Id of the same tuple in English; captions are produced once per base tuple.
std::string base_spec_id(const PromptSpec& spec);

// Builds a fully populated spec (id and simple caption) from a tuple.
PromptSpec make_spec(const Vocabulary& vocab, AgeGroup age, Gender gender, std::string_view person_country,
                     std::string_view landmark, std::string_view language);

std::string spec_to_json(const PromptSpec& spec);
PromptSpec spec_from_json(std::string_view line);

std::string export_matrix_jsonl(std::span<const PromptSpec> specs);
std::vector<PromptSpec> parse_matrix_jsonl(std::string_view text);

}  // namespace mosaig

#endif  // MOSAIG_MATRIX_HPP_
