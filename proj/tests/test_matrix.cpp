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

#include <set>

#include "mosaig/errors.hpp"
#include "mosaig/image.hpp"
#include "mosaig/matrix.hpp"
#include "mosaig/records.hpp"
#include "mosaig/tokenizer.hpp"
#include "mosaig/vocabulary.hpp"
#include "test_support.hpp"

namespace mosaig {
namespace {

const Vocabulary& vocab() { return Vocabulary::seeded(); }

TEST(VocabularyTest, SeededSizes) {
  EXPECT_EQ(vocab().languages().size(), 5u);
  EXPECT_EQ(vocab().countries().size(), 5u);
  EXPECT_EQ(vocab().landmarks().size(), 25u);
  for (const auto& c : vocab().country_names()) EXPECT_EQ(vocab().landmarks_of(c).size(), 5u) << c;
}

TEST(VocabularyTest, LookupsAndDemonyms) {
  EXPECT_EQ(vocab().country_by_demonym("Vietnamese").name, "Vietnam");
  EXPECT_EQ(vocab().landmark("Golden Gate Bridge").country, "U.S.");
  EXPECT_EQ(vocab().country("Germany").demonym, "German");
  EXPECT_THROW(vocab().landmark("Eiffel Tower"), ConfigError);
  EXPECT_THROW(vocab().language("fr"), ConfigError);
}

TEST(VocabularyTest, ParseRejectsUnknownCountry) {
  EXPECT_THROW(Vocabulary::parse("language\ten\tEnglish\nlandmark\tX\tAtlantis\n"), ConfigError);
}

TEST(VocabularyTest, AttributeParsing) {
  EXPECT_EQ(parse_age_group("elder"), AgeGroup::Elder);
  EXPECT_EQ(parse_gender("FEMALE"), Gender::Female);
  EXPECT_THROW(parse_age_group("teen"), ConfigError);
}

TEST(MatrixTest, Cardinality) {
  std::vector<std::string> en{"en"};
  EXPECT_EQ(enumerate_matrix(vocab(), en, false).size(), 750u);
  auto all = vocab().language_codes();
  EXPECT_EQ(enumerate_matrix(vocab(), all, false).size(), 3750u);
  // Same-country pairs (one of five landmark countries) drop out.
  EXPECT_EQ(enumerate_matrix(vocab(), en, true).size(), 600u);
}

TEST(MatrixTest, IdsAreUniqueAndStable) {
  auto all = vocab().language_codes();
  auto specs = enumerate_matrix(vocab(), all, false);
  std::set<std::string> ids;
  for (const auto& s : specs) {
    EXPECT_EQ(s.id.size(), 16u);
    EXPECT_EQ(s.id, spec_id(s));
    ids.insert(s.id);
  }
  EXPECT_EQ(ids.size(), specs.size());
  auto again = enumerate_matrix(vocab(), all, false);
  EXPECT_EQ(again, specs);
}

TEST(MatrixTest, OrderIsAgeGenderCountryLandmarkLanguage) {
  auto specs = enumerate_matrix(vocab(), std::vector<std::string>{"en", "de"}, false);
  EXPECT_EQ(specs[0].language, "en");
  EXPECT_EQ(specs[1].language, "de");
  EXPECT_EQ(specs[0].landmark, specs[1].landmark);
  EXPECT_EQ(specs[0].age, AgeGroup::Child);
  EXPECT_EQ(specs.back().age, AgeGroup::Elder);
}

TEST(MatrixTest, SimpleCaptionMatchesWorkedExample) {
  auto spec = make_spec(vocab(), AgeGroup::Child, Gender::Female, "Vietnam", "Golden Gate Bridge", "en");
  EXPECT_EQ(spec.simple_caption,
            "A Vietnamese girl wearing traditional attire, standing in front of the Golden Gate Bridge.");
  EXPECT_EQ(spec.landmark_country, "U.S.");
  EXPECT_EQ(spec.demonym, "Vietnamese");
}

TEST(MatrixTest, BaseIdIgnoresLanguage) {
  auto en = make_spec(vocab(), AgeGroup::Adult, Gender::Male, "India", "Alhambra", "en");
  auto hi = make_spec(vocab(), AgeGroup::Adult, Gender::Male, "India", "Alhambra", "hi");
  EXPECT_NE(en.id, hi.id);
  EXPECT_EQ(base_spec_id(en), base_spec_id(hi));
  EXPECT_EQ(base_spec_id(en), en.id);
}

TEST(MatrixTest, FilterRestrictsAxes) {
  auto specs = testing::mini_matrix();
  ASSERT_EQ(specs.size(), 12u);
  for (const auto& s : specs) {
    EXPECT_EQ(s.age, AgeGroup::Child);
    EXPECT_TRUE(s.person_country == "Germany" || s.person_country == "Vietnam");
  }
  MatrixFilter bad;
  bad.countries = {"Narnia"};
  EXPECT_THROW(enumerate_matrix(vocab(), std::vector<std::string>{"en"}, false, bad), ConfigError);
  EXPECT_THROW(enumerate_matrix(vocab(), std::vector<std::string>{}, false), ConfigError);
}

TEST(MatrixTest, JsonlRoundTrip) {
  auto specs = testing::mini_matrix({"en", "vi"});
  specs[0].agentic_caption = "A caption with \"quotes\" and ü.";
  auto back = parse_matrix_jsonl(export_matrix_jsonl(specs));
  EXPECT_EQ(back, specs);
}

TEST(TokenizerTest, WordPunctSegmentation) {
  WordPunctTokenizer tok;
  EXPECT_EQ(tok.count("A 12-year-old girl, standing."), 10u);  // A 12 - year - old girl , standing .
  EXPECT_EQ(tok.count(""), 0u);
  EXPECT_EQ(tok.count("   "), 0u);
  // Non-ASCII bytes join letter runs.
  EXPECT_EQ(tok.count("Áo Dài"), 2u);
}

TEST(TokenizerTest, TruncateKeepsTokenPrefix) {
  WordPunctTokenizer tok;
  EXPECT_EQ(tok.truncate("one two, three four", 3), "one two,");
  EXPECT_EQ(tok.truncate("short", 77), "short");
  EXPECT_EQ(tok.count(tok.truncate(std::string(500, 'a') + " b c d", 2)), 2u);
}

TEST(TokenizerTest, FactoryKnowsDefault) {
  EXPECT_EQ(make_tokenizer("word-punct-v1")->name(), "word-punct-v1");
  EXPECT_THROW(make_tokenizer("bpe-unknown"), ConfigError);
}

TEST(ImageTest, PngRoundTrip) {
  Image img{7, 5, {}};
  for (int i = 0; i < 7 * 5 * 3; ++i) img.rgb.push_back(static_cast<std::uint8_t>(i * 13));
  auto png = encode_png(img);
  ASSERT_GT(png.size(), 8u);
  EXPECT_EQ(decode_png(png), img);
}

TEST(ImageTest, CorruptPngIsProtocolError) {
  std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  EXPECT_THROW(decode_png(junk), ProtocolError);
  Image img{2, 2, std::vector<std::uint8_t>(12, 9)};
  auto png = encode_png(img);
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_png(png), ProtocolError);
}

TEST(RecordsTest, ScoreJsonRoundTrip) {
  ScoreRecord r;
  r.spec_id = "abc";
  r.metric = Metric::Knowledge;
  r.value = -0.123456789012345678;
  r.swap_kind = SwapKind::Landmark;
  r.swap_target = "White House";
  r.mode = CaptionMode::MultiAgent;
  r.model = "alt-M";
  r.scorer_fingerprint = "stub";
  EXPECT_EQ(score_from_json(score_to_json(r)), r);
  EXPECT_EQ(parse_caption_mode("multi-agent"), CaptionMode::MultiAgent);
  EXPECT_THROW(parse_metric("Beauty"), Error);
}

}  // namespace
}  // namespace mosaig
