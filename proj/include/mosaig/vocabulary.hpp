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

#ifndef MOSAIG_VOCABULARY_HPP_
#define MOSAIG_VOCABULARY_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mosaig {

enum class AgeGroup { Child, Adult, Elder };
enum class Gender { Female, Male };

inline constexpr std::array<AgeGroup, 3> kAgeGroups{AgeGroup::Child, AgeGroup::Adult, AgeGroup::Elder};
inline constexpr std::array<Gender, 2> kGenders{Gender::Female, Gender::Male};

std::string_view to_string(AgeGroup age);
std::string_view to_string(Gender gender);
// Case-insensitive; throws ConfigError on unknown names.
AgeGroup parse_age_group(std::string_view name);
Gender parse_gender(std::string_view name);

struct Language {
  std::string code;
  std::string name;
};

struct Country {
  std::string name;
  std::string demonym;
  std::vector<std::string> languages;
};

struct Landmark {
  std::string name;
  std::string country;
};

// The demographic vocabulary: languages, countries and their landmarks, in
// file order. File order defines matrix enumeration order.
class Vocabulary {
 public:
  // Parses the tab-separated vocabulary format; throws ConfigError.
  static Vocabulary parse(std::string_view text);
  // The shipped seed data.
  static const Vocabulary& seeded();

  const std::vector<Language>& languages() const { return languages_; }
  const std::vector<Country>& countries() const { return countries_; }
  const std::vector<Landmark>& landmarks() const { return landmarks_; }

  const Language& language(std::string_view code) const;
  const Country& country(std::string_view name) const;
  const Landmark& landmark(std::string_view name) const;
  // Country whose demonym matches, e.g. "Vietnamese" -> Vietnam.
  const Country& country_by_demonym(std::string_view demonym) const;

  std::size_t language_index(std::string_view code) const;
  std::size_t country_index(std::string_view name) const;
  std::size_t landmark_index(std::string_view name) const;

  std::vector<std::string> landmarks_of(std::string_view country) const;
  std::vector<std::string> language_codes() const;
  std::vector<std::string> country_names() const;

 private:
  std::vector<Language> languages_;
  std::vector<Country> countries_;
  std::vector<Landmark> landmarks_;
};

}  // namespace mosaig

#endif  // MOSAIG_VOCABULARY_HPP_
