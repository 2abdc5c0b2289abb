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

#include "mosaig/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "mosaig/embedded_data.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

std::string_view to_string(AgeGroup age) {
  switch (age) {
    case AgeGroup::Child: return "Child";
    case AgeGroup::Adult: return "Adult";
    case AgeGroup::Elder: return "Elder";
  }
  return "?";
}

std::string_view to_string(Gender gender) { return gender == Gender::Female ? "Female" : "Male"; }

AgeGroup parse_age_group(std::string_view name) {
  auto lower = to_lower(trim(name));
  for (auto a : kAgeGroups)
    if (to_lower(to_string(a)) == lower) return a;
  throw ConfigError("unknown age group '" + std::string(name) + "'");
}

Gender parse_gender(std::string_view name) {
  auto lower = to_lower(trim(name));
  for (auto g : kGenders)
    if (to_lower(to_string(g)) == lower) return g;
  throw ConfigError("unknown gender '" + std::string(name) + "'");
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary v;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    auto line = std::string(trim(raw));
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    auto where = "vocabulary line " + std::to_string(lineno);
    if (fields[0] == "language") {
      if (fields.size() != 3) throw ConfigError(where + ": language needs code and name");
      v.languages_.push_back({fields[1], fields[2]});
    } else if (fields[0] == "landmark") {
      if (fields.size() != 5) throw ConfigError(where + ": landmark needs name, country, demonym, languages");
      const auto& name = fields[1];
      const auto& country = fields[2];
      const auto& demonym = fields[3];
      if (demonym.empty()) throw ConfigError(where + ": empty demonym");
      auto it = std::find_if(v.countries_.begin(), v.countries_.end(),
                             [&](const Country& c) { return c.name == country; });
      if (it == v.countries_.end()) {
        v.countries_.push_back({country, demonym, split(fields[4], ',')});
      } else if (it->demonym != demonym) {
        throw ConfigError(where + ": conflicting demonym for " + country);
      }
      v.landmarks_.push_back({name, country});
    } else {
      throw ConfigError(where + ": unknown record '" + fields[0] + "'");
    }
  }
  std::set<std::string> seen;
  for (const auto& l : v.landmarks_)
    if (!seen.insert(l.name).second) throw ConfigError("duplicate landmark '" + l.name + "'");
  seen.clear();
  for (const auto& l : v.languages_)
    if (!seen.insert(l.code).second) throw ConfigError("duplicate language '" + l.code + "'");
  if (v.languages_.empty() || v.countries_.empty()) throw ConfigError("vocabulary is empty");
  return v;
}

const Vocabulary& Vocabulary::seeded() {
  static const Vocabulary v = parse(embedded::vocabulary);
  return v;
}

const Language& Vocabulary::language(std::string_view code) const { return languages_[language_index(code)]; }
const Country& Vocabulary::country(std::string_view name) const { return countries_[country_index(name)]; }
const Landmark& Vocabulary::landmark(std::string_view name) const { return landmarks_[landmark_index(name)]; }

const Country& Vocabulary::country_by_demonym(std::string_view demonym) const {
  for (const auto& c : countries_)
    if (c.demonym == demonym) return c;
  throw ConfigError("unknown demonym '" + std::string(demonym) + "'");
}

std::size_t Vocabulary::language_index(std::string_view code) const {
  for (std::size_t i = 0; i < languages_.size(); ++i)
    if (languages_[i].code == code) return i;
  throw ConfigError("unknown language code '" + std::string(code) + "'");
}

std::size_t Vocabulary::country_index(std::string_view name) const {
  for (std::size_t i = 0; i < countries_.size(); ++i)
    if (countries_[i].name == name) return i;
  throw ConfigError("unknown country '" + std::string(name) + "'");
}

std::size_t Vocabulary::landmark_index(std::string_view name) const {
  for (std::size_t i = 0; i < landmarks_.size(); ++i)
    if (landmarks_[i].name == name) return i;
  throw ConfigError("unknown landmark '" + std::string(name) + "'");
}

std::vector<std::string> Vocabulary::landmarks_of(std::string_view country) const {
  std::vector<std::string> out;
  for (const auto& l : landmarks_)
    if (l.country == country) out.push_back(l.name);
  return out;
}

std::vector<std::string> Vocabulary::language_codes() const {
  std::vector<std::string> out;
  for (const auto& l : languages_) out.push_back(l.code);
  return out;
}

std::vector<std::string> Vocabulary::country_names() const {
  std::vector<std::string> out;
  for (const auto& c : countries_) out.push_back(c.name);
  return out;
}

}  // namespace mosaig
