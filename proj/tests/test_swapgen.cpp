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

#include <gtest/gtest.h>

#include "mosaig/errors.hpp"
#include "mosaig/swapgen.hpp"
#include "mosaig/vocabulary.hpp"
#include "test_support.hpp"

namespace mosaig {
namespace {

const Vocabulary& vocab() { return Vocabulary::seeded(); }

PromptSpec german_boy_at_taj() {
  return make_spec(vocab(), AgeGroup::Child, Gender::Male, "Germany", "Taj Mahal", "en");
}

TEST(SwapCaptionTest, WorkedGenderExample) {
  EXPECT_EQ(swap_caption("A German boy in front of Taj Mahal", german_boy_at_taj(), SwapKind::Gender, "Female"),
            "A German girl in front of Taj Mahal");
}

TEST(SwapCaptionTest, WorkedLandmarkExample) {
  EXPECT_EQ(swap_caption("A German boy in front of Taj Mahal", german_boy_at_taj(), SwapKind::Landmark, "White House"),
            "A German boy in front of White House");
}

TEST(SwapCaptionTest, NationalitySwapsDemonymAndCountry) {
  auto spec = german_boy_at_taj();
  EXPECT_EQ(swap_caption("A German boy in traditional German attire.", spec, SwapKind::Nationality, "Vietnam"),
            "A Vietnamese boy in traditional Vietnamese attire.");
  // Country names may name the landmark's country, so they stay.
  EXPECT_EQ(swap_caption("A German boy from Germany.", spec, SwapKind::Nationality, "Vietnam"),
            "A Vietnamese boy from Germany.");
  // Article-sensitive demonyms are not re-articled; the template keeps "A".
  EXPECT_EQ(swap_caption("A German boy.", spec, SwapKind::Nationality, "India"), "A Indian boy.");
}

TEST(SwapCaptionTest, AgeSwapsMultiWordNouns) {
  auto spec = make_spec(vocab(), AgeGroup::Elder, Gender::Female, "Spain", "Alhambra", "en");
  EXPECT_EQ(swap_caption(spec.simple_caption, spec, SwapKind::Age, "Child"),
            "A Spanish girl wearing traditional attire, standing in front of the Alhambra.");
}

TEST(SwapCaptionTest, PreservesLeadingCapital) {
  auto spec = german_boy_at_taj();
  EXPECT_EQ(swap_caption("Boy and boy.", spec, SwapKind::Gender, "Female"), "Girl and girl.");
}

TEST(SwapCaptionTest, WholeWordsOnly) {
  auto spec = german_boy_at_taj();
  // "boys" is its own lexicon entry; "boyish" is not a token of the lexicon.
  EXPECT_EQ(swap_caption("A boyish boy.", spec, SwapKind::Gender, "Female"), "A boyish girl.");
  EXPECT_THROW(swap_caption("A boyish look.", spec, SwapKind::Gender, "Female"), SwapInapplicableError);
}

TEST(SwapCaptionTest, InapplicableCaptionIsReported) {
  auto spec = german_boy_at_taj();
  EXPECT_THROW(swap_caption("Someone near a monument.", spec, SwapKind::Landmark, "White House"),
               SwapInapplicableError);
}

TEST(SwapCaptionTest, SameValueIsRejected) {
  auto spec = german_boy_at_taj();
  EXPECT_THROW(swap_caption(spec.simple_caption, spec, SwapKind::Gender, "Male"), ValidationError);
}

// Property: swapping to v and back restores every simple caption.
TEST(SwapCaptionTest, InvolutionOverMatrix) {
  auto specs = enumerate_matrix(vocab(), std::vector<std::string>{"en"}, false);
  for (const auto& spec : specs) {
    for (auto kind : {SwapKind::Gender, SwapKind::Age, SwapKind::Nationality}) {
      const auto own = attribute_value(spec, kind);
      std::vector<std::string> targets;
      if (kind == SwapKind::Gender) targets = {spec.gender == Gender::Male ? "Female" : "Male"};
      if (kind == SwapKind::Age)
        for (auto a : kAgeGroups)
          if (std::string(to_string(a)) != own) targets.emplace_back(to_string(a));
      if (kind == SwapKind::Nationality)
        for (const auto& c : vocab().country_names())
          if (c != own) targets.push_back(c);
      for (const auto& t : targets) {
        auto swapped = swap_caption(spec.simple_caption, spec, kind, t);
        ASSERT_NE(swapped, spec.simple_caption);
        PromptSpec other = spec;
        if (kind == SwapKind::Gender) other.gender = parse_gender(t);
        if (kind == SwapKind::Age) other.age = parse_age_group(t);
        if (kind == SwapKind::Nationality) {
          other.person_country = t;
          other.demonym = vocab().country(t).demonym;
        }
        ASSERT_EQ(swapped, make_spec(vocab(), other.age, other.gender, other.person_country, other.landmark, "en")
                               .simple_caption);
        ASSERT_EQ(swap_caption(swapped, other, kind, own), spec.simple_caption);
      }
    }
  }
}

TEST(EnumerateSwapsTest, CounterpartsComeFromRunMatrix) {
  auto specs = testing::mini_matrix();
  SwapContext ctx{vocab(), specs, CaptionMode::Simple, nullptr};
  const auto& spec = specs.front();
  auto gender = enumerate_swaps(spec, SwapKind::Gender, ctx);
  ASSERT_EQ(gender.size(), 1u);
  EXPECT_EQ(gender[0].image_policy, ImagePolicy::UseSwappedImage);
  auto expected = make_spec(vocab(), spec.age, Gender::Male, spec.person_country, spec.landmark, "en");
  EXPECT_EQ(gender[0].swapped_spec_id.value(), expected.id);
  EXPECT_EQ(gender[0].swapped_caption, expected.simple_caption);
  // Only children in the mini matrix: no age counterparts.
  EXPECT_TRUE(enumerate_swaps(spec, SwapKind::Age, ctx).empty());
  EXPECT_EQ(enumerate_swaps(spec, SwapKind::Nationality, ctx).size(), 1u);
}

TEST(EnumerateSwapsTest, LandmarkSwapsKeepOriginalImage) {
  auto specs = testing::mini_matrix();
  SwapContext ctx{vocab(), specs, CaptionMode::Simple, nullptr};
  auto pairs = enumerate_swaps(specs.front(), SwapKind::Landmark, ctx);
  EXPECT_EQ(pairs.size(), 24u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.image_policy, ImagePolicy::UseOriginalImage);
    EXPECT_FALSE(p.swapped_spec_id.has_value());
    EXPECT_NE(p.swapped_caption.find(p.target_value), std::string::npos);
  }
}

TEST(EnumerateSwapsTest, MissingCounterpartImageIsIncomplete) {
  auto specs = testing::mini_matrix();
  SwapContext ctx{vocab(), specs, CaptionMode::Simple, [](const std::string&) { return false; }};
  EXPECT_THROW(enumerate_swaps(specs.front(), SwapKind::Gender, ctx), IncompleteMatrixError);
}

TEST(EnumerateSwapsTest, MultiAgentNeedsCaption) {
  auto specs = testing::mini_matrix();
  SwapContext ctx{vocab(), specs, CaptionMode::MultiAgent, nullptr};
  EXPECT_THROW(enumerate_swaps(specs.front(), SwapKind::Gender, ctx), Error);
  specs[0].agentic_caption = "A 12-year-old German girl in a Dirndl at the Golden Gate Bridge.";
  auto pairs = enumerate_swaps(specs[0], SwapKind::Gender, ctx);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].swapped_caption, "A 12-year-old German boy in a Dirndl at the Golden Gate Bridge.");
}

TEST(LexiconTest, SubstitutionsLongestFirst) {
  auto subs = Lexicon::seeded().substitutions(SwapKind::Age, "Elder", "Child");
  ASSERT_FALSE(subs.empty());
  for (std::size_t i = 1; i < subs.size(); ++i) EXPECT_GE(subs[i - 1].first.size(), subs[i].first.size());
}

}  // namespace
}  // namespace mosaig
