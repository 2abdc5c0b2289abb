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

#include <functional>
#include <set>

#include "mosaig/backends.hpp"
#include "mosaig/captioner.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/tokenizer.hpp"
#include "test_support.hpp"

namespace mosaig {
namespace {

class FnChat final : public ChatModel {
 public:
  using Fn = std::function<std::string(std::span<const ChatMessage>)>;
  explicit FnChat(Fn fn) : fn_(std::move(fn)) {}
  std::string send(std::span<const ChatMessage> messages) override { return fn_(messages); }
  std::string fingerprint() const override { return "fn-chat"; }

 private:
  Fn fn_;
};

bool is_summary_request(std::span<const ChatMessage> m) {
  return !m.empty() && m.back().text.find("Caption:") != std::string::npos;
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += i ? " word" : "word";
  return s;
}

class CaptionerTest : public ::testing::Test {
 protected:
  WordPunctTokenizer tokenizer;
  Captioner captioner{PromptPack::seeded(), tokenizer};
};

TEST_F(CaptionerTest, ModeratorAssignsOneTaskPerSocialAgent) {
  auto spec = make_spec(Vocabulary::seeded(), AgeGroup::Child, Gender::Female, "Vietnam", "Golden Gate Bridge", "en");
  auto tasks = captioner.moderate(spec);
  ASSERT_EQ(tasks.size(), 3u);
  EXPECT_EQ(tasks[0].target, PersonaRole::CountryAgent);
  EXPECT_EQ(tasks[1].target, PersonaRole::AgeGenderAgent);
  EXPECT_EQ(tasks[2].target, PersonaRole::LandmarkAgent);
  EXPECT_NE(tasks[0].instruction.find("Vietnamese"), std::string::npos);
  EXPECT_NE(tasks[1].instruction.find("a girl"), std::string::npos);
  EXPECT_NE(tasks[2].instruction.find("Golden Gate Bridge in U.S."), std::string::npos);
  EXPECT_EQ(tasks, captioner.moderate(spec));
}

TEST_F(CaptionerTest, TranscriptShape) {
  auto chat = stub_chat(demo_chat_script());
  for (const auto& spec : testing::mini_matrix()) {
    auto t = captioner.run_conversation(spec, *chat);
    ASSERT_EQ(t.turns.size(), 22u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(t.turns[i].kind, TurnKind::InitialDescription);
    for (int round = 0; round < 2; ++round)
      for (int ex = 0; ex < 3; ++ex) {
        const auto base = 3 + round * 9 + ex * 3;
        EXPECT_EQ(t.turns[base].kind, TurnKind::Question);
        EXPECT_EQ(t.turns[base + 1].kind, TurnKind::Answer);
        EXPECT_EQ(t.turns[base + 2].kind, TurnKind::Refinement);
        EXPECT_EQ(t.turns[base].round, round + 1);
      }
    EXPECT_EQ(t.turns.back().kind, TurnKind::Summary);
    EXPECT_EQ(t.turns.back().speaker, PersonaRole::Summarizer);
    EXPECT_LE(tokenizer.count(t.final_caption), 77u);
    EXPECT_EQ(t.token_count, tokenizer.count(t.final_caption));
    EXPECT_FALSE(t.truncated);
    EXPECT_EQ(t.spec_id, spec.id);
  }
}

TEST_F(CaptionerTest, RoundsScaleTurnCount) {
  auto chat = stub_chat(demo_chat_script());
  auto spec = testing::mini_matrix().front();
  for (int rounds : {1, 3}) {
    Captioner c(PromptPack::seeded(), tokenizer, CaptionerOptions{rounds});
    EXPECT_EQ(c.run_conversation(spec, *chat).turns.size(), static_cast<std::size_t>(3 + 9 * rounds + 1));
  }
}

TEST_F(CaptionerTest, SummaryCaptionCombinesDescriptions) {
  auto chat = stub_chat(demo_chat_script());
  auto spec = make_spec(Vocabulary::seeded(), AgeGroup::Child, Gender::Female, "Vietnam", "Golden Gate Bridge", "en");
  auto t = captioner.run_conversation(spec, *chat);
  EXPECT_NE(t.final_caption.find("Vietnamese"), std::string::npos);
  EXPECT_NE(t.final_caption.find("girl"), std::string::npos);
  EXPECT_NE(t.final_caption.find("Golden Gate Bridge"), std::string::npos);
}

// Each Social Agent sees only its own attribute: the framework never renders
// another persona's binding into that agent's requests.
TEST_F(CaptionerTest, PersonaIsolationOverFullMatrix) {
  auto chat = stub_chat(demo_chat_script());
  auto specs = enumerate_matrix(Vocabulary::seeded(), std::vector<std::string>{"en"}, false);
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    if (!seen.insert(base_spec_id(spec)).second) continue;
    const auto country = persona_bindings(PersonaRole::CountryAgent, spec);
    const auto age_gender = persona_bindings(PersonaRole::AgeGenderAgent, spec);
    const auto landmark = persona_bindings(PersonaRole::LandmarkAgent, spec);
    const bool same_country = spec.person_country == spec.landmark_country;
    auto forbidden_for = [&](PersonaRole role) {
      // Values the agent owns itself (e.g. the landmark's country when it is
      // also the person's) are never forbidden.
      std::set<std::string> own;
      for (const auto& [k, v] : persona_bindings(role, spec)) own.insert(v);
      std::vector<std::string> out;
      auto add = [&](const std::map<std::string, std::string>& b) {
        for (const auto& [k, v] : b)
          if (!own.count(v)) out.push_back(v);
      };
      if (role != PersonaRole::AgeGenderAgent) add(age_gender);
      if (role != PersonaRole::LandmarkAgent) add(landmark);
      if (role != PersonaRole::CountryAgent && !same_country) add(country);
      return out;
    };
    auto t = captioner.run_conversation(spec, *chat);
    for (const auto& turn : t.turns) {
      if (turn.speaker == PersonaRole::Summarizer) continue;
      for (const auto& value : forbidden_for(turn.speaker))
        for (const auto& msg : turn.prompt)
          ASSERT_EQ(msg.text.find(value), std::string::npos)
              << to_string(turn.speaker) << " saw '" << value << "' for " << spec.simple_caption;
    }
  }
  EXPECT_EQ(seen.size(), 750u);
}

TEST_F(CaptionerTest, PersonaBindingsAreDisjoint) {
  auto spec = make_spec(Vocabulary::seeded(), AgeGroup::Elder, Gender::Male, "India", "White House", "en");
  auto c = persona_bindings(PersonaRole::CountryAgent, spec);
  auto a = persona_bindings(PersonaRole::AgeGenderAgent, spec);
  auto l = persona_bindings(PersonaRole::LandmarkAgent, spec);
  EXPECT_EQ(c.at("demonym"), "Indian");
  EXPECT_EQ(c.at("a_demonym"), "an Indian");
  EXPECT_EQ(a.at("person"), "an elderly man");
  EXPECT_EQ(l.at("landmark_country"), "U.S.");
  for (const auto& [k, v] : c) {
    EXPECT_FALSE(a.count(k));
    EXPECT_FALSE(l.count(k));
  }
  EXPECT_THROW(persona_bindings(PersonaRole::Summarizer, spec), ConfigError);
}

TEST_F(CaptionerTest, SummarizerAcceptsFirstReplyWithinBudget) {
  FnChat chat([](std::span<const ChatMessage>) { return std::string("A short caption."); });
  auto r = captioner.summarize({"a", "b", "c"}, chat);
  EXPECT_EQ(r.caption, "A short caption.");
  EXPECT_EQ(r.attempts, 1);
  EXPECT_FALSE(r.truncated);
}

TEST_F(CaptionerTest, SummarizerRepromptsWithShrinkingBudget) {
  std::vector<std::string> budgets;
  FnChat chat([&](std::span<const ChatMessage> m) {
    auto& text = m.back().text;
    auto at = text.find("at most ");
    budgets.push_back(text.substr(at + 8, text.find(' ', at + 8) - at - 8));
    return budgets.size() == 1 ? words(90) : words(50);
  });
  auto r = captioner.summarize({"a", "b", "c"}, chat);
  EXPECT_EQ(budgets, (std::vector<std::string>{"77", "62"}));
  EXPECT_EQ(r.attempts, 2);
  EXPECT_EQ(r.token_count, 50u);
  EXPECT_FALSE(r.truncated);
}

TEST_F(CaptionerTest, SummarizerTruncatesAfterLastAttempt) {
  int calls = 0;
  FnChat chat([&](std::span<const ChatMessage>) {
    ++calls;
    return words(120);
  });
  auto r = captioner.summarize({"a", "b", "c"}, chat);
  EXPECT_EQ(calls, 3);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.token_count, 77u);
  EXPECT_EQ(tokenizer.count(r.caption), 77u);
  EXPECT_EQ(r.caption, tokenizer.truncate(words(120), 77));
}

TEST_F(CaptionerTest, SummarizerAllEmptyIsProtocolError) {
  FnChat chat([](std::span<const ChatMessage>) { return std::string("   "); });
  EXPECT_THROW(captioner.summarize({"a", "b", "c"}, chat), ProtocolError);
  EXPECT_THROW(captioner.summarize({"a", "", "c"}, chat), ProtocolError);
}

TEST_F(CaptionerTest, EmptyPersonaRepliesAreRetriedThenFail) {
  int empty_left = 2;
  FnChat flaky([&](std::span<const ChatMessage> m) {
    if (is_summary_request(m)) return std::string("caption");
    if (empty_left > 0) {
      --empty_left;
      return std::string("");
    }
    return std::string("fine");
  });
  auto spec = testing::mini_matrix().front();
  EXPECT_EQ(captioner.run_conversation(spec, flaky).turns.size(), 22u);
  FnChat mute([](std::span<const ChatMessage>) { return std::string(); });
  EXPECT_THROW(captioner.run_conversation(spec, mute), ProtocolError);
}

TEST_F(CaptionerTest, TransportFailureCarriesPartialTranscript) {
  FnChat chat([](std::span<const ChatMessage> m) -> std::string {
    if (is_summary_request(m)) throw BackendError("http://chat", "connection refused", true);
    return "fine";
  });
  auto spec = testing::mini_matrix().front();
  try {
    captioner.run_conversation(spec, chat);
    FAIL() << "expected ConversationTransportError";
  } catch (const ConversationTransportError& e) {
    EXPECT_EQ(e.partial().turns.size(), 21u);
    EXPECT_TRUE(e.transient());
  }
}

TEST_F(CaptionerTest, PromptPackRequiresAllSections) {
  EXPECT_THROW(PromptPack::parse("@@ initial\nTask: {task}\n"), ConfigError);
  EXPECT_EQ(PromptPack::seeded().keys().size(), 14u);
}

TEST_F(CaptionerTest, CaptionMatrixDedupesLanguagesAndResumes) {
  testing::TempDir dir;
  auto store = RunStore::open(dir.path(), "r", {{"mode", "MultiAgent"}});
  auto specs = testing::mini_matrix({"en", "vi"});
  ASSERT_EQ(specs.size(), 24u);
  store.put_specs(specs);
  auto chat = stub_chat(demo_chat_script());
  auto first = caption_matrix(specs, *chat, store, captioner, 3);
  EXPECT_EQ(first.completed, 12u);
  EXPECT_EQ(first.failed, 0u);
  EXPECT_TRUE(store.missing(Stage::Captions, CaptionMode::MultiAgent).empty());
  auto second = caption_matrix(specs, *chat, store, captioner, 3);
  EXPECT_EQ(second.completed, 0u);
  EXPECT_EQ(second.skipped, 12u);
  for (const auto& s : store.specs()) {
    ASSERT_TRUE(s.agentic_caption.has_value());
    EXPECT_EQ(*s.agentic_caption, store.get_transcript(base_spec_id(s))->final_caption);
  }
}

TEST_F(CaptionerTest, CaptionMatrixCollectsFailures) {
  testing::TempDir dir;
  auto store = RunStore::open(dir.path(), "r", {});
  auto specs = testing::mini_matrix();
  store.put_specs(specs);
  FnChat chat([&](std::span<const ChatMessage> m) -> std::string {
    for (const auto& msg : m)
      if (msg.text.find("Taj Mahal") != std::string::npos) throw BackendError("http://chat", "HTTP 500", true);
    return is_summary_request(m) ? "A caption." : "fine";
  });
  auto p = caption_matrix(specs, chat, store, captioner, 2);
  EXPECT_EQ(p.failed, 4u);  // 2 genders x 2 countries at the Taj Mahal
  EXPECT_EQ(p.completed, 8u);
  EXPECT_EQ(p.failures.size(), 4u);
  EXPECT_EQ(store.missing(Stage::Captions, CaptionMode::MultiAgent).size(), 4u);
}

}  // namespace
}  // namespace mosaig
