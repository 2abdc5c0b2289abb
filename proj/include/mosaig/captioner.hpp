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

#ifndef MOSAIG_CAPTIONER_HPP_
#define MOSAIG_CAPTIONER_HPP_

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosaig/backends.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/matrix.hpp"
#include "mosaig/records.hpp"
#include "mosaig/tokenizer.hpp"

namespace mosaig {

class RunStore;

// Persona and instruction templates keyed by section name, e.g.
// "country.system" or "question.country_to_landmark".
class PromptPack {
 public:
  // Sections start with "@@ <key>"; '#' lines before the first section are
  // comments. Throws ConfigError when a required section is missing.
  static PromptPack parse(std::string_view text);
  static const PromptPack& seeded();

  const std::string& get(std::string_view key) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::string, std::less<>> sections_;
};

struct TaskAssignment {
  PersonaRole target = PersonaRole::CountryAgent;
  std::string instruction;
  std::string spec_id;

  bool operator==(const TaskAssignment&) const = default;
};

// Template variables each persona may see. A template that references a
// field outside its persona's binding fails to render.
std::map<std::string, std::string> persona_bindings(PersonaRole role, const PromptSpec& spec);

struct SummaryResult {
  std::string caption;
  std::size_t token_count = 0;
  bool truncated = false;
  int attempts = 0;
  std::vector<ChatMessage> prompt;  // request behind the accepted reply
};

// Backend failure mid-conversation. Retriable; carries the turns logged so far.
class ConversationTransportError : public BackendError {
 public:
  ConversationTransportError(const BackendError& cause, Transcript partial)
      : BackendError(cause.endpoint(), std::string("conversation interrupted: ") + cause.what(), true),
        partial_(std::move(partial)) {}
  const Transcript& partial() const { return partial_; }

 private:
  Transcript partial_;
};

struct CaptionerOptions {
  int rounds = 2;
  std::size_t token_budget = 77;
  int summary_attempts = 3;
  int reply_attempts = 3;  // per persona turn, retried on empty replies
};

// Drives the Moderator, the three Social Agents and the Summarizer.
//
// Each round runs a fixed question schedule; every exchange is a Question
// from the asking agent, an Answer from the asked agent, and a Refinement
// of the asker's own description:
//   1. Age-Gender Agent asks the Country Agent about attire suitability.
//   2. Country Agent asks the Landmark Agent about visitor interaction.
//   3. Country Agent cross-checks the Age-Gender Agent's accessories and
//      mannerisms.
// A successful transcript therefore holds 3 + 9 * rounds + 1 turns.
class Captioner {
 public:
  Captioner(const PromptPack& pack, const Tokenizer& tokenizer, CaptionerOptions options = {});

  // Deterministic, no model call: one assignment per Social Agent.
  std::vector<TaskAssignment> moderate(const PromptSpec& spec) const;

  Transcript run_conversation(const PromptSpec& spec, ChatModel& chat) const;

  // Budget-respecting summary. Over-budget replies are re-prompted with a
  // shrinking budget; after the last attempt the reply is cut at a token
  // boundary and flagged. ProtocolError if every attempt is empty.
  SummaryResult summarize(const std::array<std::string, 3>& descriptions, ChatModel& chat) const;

  const CaptionerOptions& options() const { return options_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }

 private:
  const PromptPack& pack_;
  const Tokenizer& tokenizer_;
  CaptionerOptions options_;
};

struct CaptionProgress {
  std::size_t completed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // spec id, reason
};

// Captions every distinct base tuple that has no persisted transcript.
// Per-spec failures are collected, never abort the batch.
CaptionProgress caption_matrix(std::span<const PromptSpec> specs, ChatModel& chat, RunStore& store,
                               const Captioner& captioner, int workers = 1);

}  // namespace mosaig

#endif  // MOSAIG_CAPTIONER_HPP_
