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

#include "mosaig/matrix.hpp"

#include <algorithm>
#include <json.hpp>

#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

namespace {

template <typename T>
bool admitted(const std::vector<T>& allow, const T& value) {
  return allow.empty() || std::find(allow.begin(), allow.end(), value) != allow.end();
}

}  // namespace

std::string_view age_gender_noun(AgeGroup age, Gender gender) {
  const bool female = gender == Gender::Female;
  switch (age) {
    case AgeGroup::Child: return female ? "girl" : "boy";
    case AgeGroup::Adult: return female ? "woman" : "man";
    case AgeGroup::Elder: return female ? "elderly woman" : "elderly man";
  }
  return "";
}

std::string render_simple_caption(const PromptSpec& spec) {
  if (spec.demonym.empty() || spec.landmark.empty()) throw ConfigError("spec is missing demonym or landmark");
  std::string out = "A ";
  out += spec.demonym;
  out += ' ';
  out += age_gender_noun(spec.age, spec.gender);
  out += " wearing traditional attire, standing in front of the ";
  out += spec.landmark;
  out += '.';
  return out;
}

std::string spec_id(AgeGroup age, Gender gender, std::string_view person_country, std::string_view landmark,
                    std::string_view language) {
  std::string canonical = "mosaig-spec-v1\x1f";
  canonical += to_string(age);
  canonical += '\x1f';
  canonical += to_string(gender);
  canonical += '\x1f';
  canonical += person_country;
  canonical += '\x1f';
  canonical += landmark;
  canonical += '\x1f';
  canonical += language;
  return sha256_hex(canonical).substr(0, 16);
}

std::string spec_id(const PromptSpec& spec) {
  return spec_id(spec.age, spec.gender, spec.person_country, spec.landmark, spec.language);
}

std::string base_spec_id(const PromptSpec& spec) {
  return spec_id(spec.age, spec.gender, spec.person_country, spec.landmark, "en");
}

PromptSpec make_spec(const Vocabulary& vocab, AgeGroup age, Gender gender, std::string_view person_country,
                     std::string_view landmark, std::string_view language) {
  const auto& country = vocab.country(person_country);
  const auto& lm = vocab.landmark(landmark);
  vocab.language(language);
  PromptSpec spec;
  spec.age = age;
  spec.gender = gender;
  spec.person_country = country.name;
  spec.demonym = country.demonym;
  spec.landmark = lm.name;
  spec.landmark_country = lm.country;
  spec.language = std::string(language);
  spec.id = spec_id(spec);
  spec.simple_caption = render_simple_caption(spec);
  return spec;
}

std::vector<PromptSpec> enumerate_matrix(const Vocabulary& vocab, std::span<const std::string> languages,
                                         bool cross_cultural_only, const MatrixFilter& filter) {
  if (languages.empty()) throw ConfigError("at least one caption language is required");
  std::vector<std::size_t> lang_idx;
  for (const auto& code : languages) lang_idx.push_back(vocab.language_index(code));
  std::sort(lang_idx.begin(), lang_idx.end());
  lang_idx.erase(std::unique(lang_idx.begin(), lang_idx.end()), lang_idx.end());
  for (const auto& c : filter.countries) vocab.country_index(c);
  for (const auto& l : filter.landmarks) vocab.landmark_index(l);

  std::vector<PromptSpec> out;
  for (auto age : kAgeGroups) {
    if (!admitted(filter.ages, age)) continue;
    for (auto gender : kGenders) {
      if (!admitted(filter.genders, gender)) continue;
      for (const auto& country : vocab.countries()) {
        if (!admitted(filter.countries, country.name)) continue;
        for (const auto& lm : vocab.landmarks()) {
          if (!admitted(filter.landmarks, lm.name)) continue;
          if (cross_cultural_only && lm.country == country.name) continue;
          for (auto li : lang_idx)
            out.push_back(make_spec(vocab, age, gender, country.name, lm.name, vocab.languages()[li].code));
        }
      }
    }
  }
  return out;
}

std::string spec_to_json(const PromptSpec& spec) {
  nlohmann::ordered_json j;
  j["id"] = spec.id;
  j["age"] = to_string(spec.age);
  j["gender"] = to_string(spec.gender);
  j["person_country"] = spec.person_country;
  j["demonym"] = spec.demonym;
  j["landmark"] = spec.landmark;
  j["landmark_country"] = spec.landmark_country;
  j["language"] = spec.language;
  j["simple_caption"] = spec.simple_caption;
  if (spec.agentic_caption) j["agentic_caption"] = *spec.agentic_caption;
  return j.dump();
}

PromptSpec spec_from_json(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    PromptSpec s;
    s.id = j.at("id").get<std::string>();
    s.age = parse_age_group(j.at("age").get<std::string>());
    s.gender = parse_gender(j.at("gender").get<std::string>());
    s.person_country = j.at("person_country").get<std::string>();
    s.demonym = j.at("demonym").get<std::string>();
    s.landmark = j.at("landmark").get<std::string>();
    s.landmark_country = j.at("landmark_country").get<std::string>();
    s.language = j.at("language").get<std::string>();
    s.simple_caption = j.at("simple_caption").get<std::string>();
    if (j.contains("agentic_caption")) s.agentic_caption = j["agentic_caption"].get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed prompt spec: ") + e.what());
  }
}

std::string export_matrix_jsonl(std::span<const PromptSpec> specs) {
  std::string out;
  for (const auto& s : specs) {
    out += spec_to_json(s);
    out += '\n';
  }
  return out;
}

std::vector<PromptSpec> parse_matrix_jsonl(std::string_view text) {
  std::vector<PromptSpec> out;
  for (const auto& line : split(text, '\n'))
    if (!trim(line).empty()) out.push_back(spec_from_json(line));
  return out;
}

}  // namespace mosaig
