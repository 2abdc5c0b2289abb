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

#include "mosaig/captioner.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "mosaig/embedded_data.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

namespace {

constexpr std::array<std::string_view, 14> kRequiredSections{
    "moderator.country",
    "moderator.age_gender",
    "moderator.landmark",
    "country.system",
    "age_gender.system",
    "landmark.system",
    "summarizer.system",
    "initial",
    "question.age_gender_to_country",
    "question.country_to_landmark",
    "question.country_to_age_gender",
    "answer",
    "refine",
    "summarize",
};

std::string with_article(std::string_view phrase) {
  if (phrase.empty()) return {};
  char c = static_cast<char>(std::tolower(static_cast<unsigned char>(phrase.front())));
  bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return (vowel ? "an " : "a ") + std::string(phrase);
}

std::string_view age_adjective(AgeGroup age) {
  switch (age) {
    case AgeGroup::Child: return "young";
    case AgeGroup::Adult: return "adult";
    case AgeGroup::Elder: return "elderly";
  }
  return "";
}

std::string_view system_key(PersonaRole role) {
  switch (role) {
    case PersonaRole::CountryAgent: return "country.system";
    case PersonaRole::AgeGenderAgent: return "age_gender.system";
    case PersonaRole::LandmarkAgent: return "landmark.system";
    case PersonaRole::Summarizer: return "summarizer.system";
  }
  return "";
}

// One Social Agent: its persona bindings and private chat history.
struct Agent {
  PersonaRole role;
  std::map<std::string, std::string> vars;
  std::vector<ChatMessage> history;
  std::string description;
};

class Conversation {
 public:
  Conversation(const PromptPack& pack, const CaptionerOptions& options, ChatModel& chat, Transcript& transcript)
      : pack_(pack), options_(options), chat_(chat), transcript_(transcript) {}

  std::string render(std::string_view key, const std::map<std::string, std::string>& vars,
                     PersonaRole role) const {
    auto text = render_template(pack_.get(key), vars);
    auto left = unresolved_placeholders(text);
    if (!left.empty())
      throw ConfigError("template '" + std::string(key) + "' leaves " + join(left, ", ") + " unresolved for " +
                        std::string(to_string(role)));
    return text;
  }

  void start(Agent& agent) {
    agent.history = {{"system", render(system_key(agent.role), agent.vars, agent.role)}};
  }

  std::string ask(Agent& agent, std::string user_text, TurnKind kind, std::optional<PersonaRole> addressee,
                  int round) {
    std::vector<ChatMessage> request = agent.history;
    request.push_back({"user", std::move(user_text)});
    std::string reply;
    for (int attempt = 0; attempt < std::max(1, options_.reply_attempts) && reply.empty(); ++attempt) {
      try {
        reply = std::string(trim(chat_.send(request)));
      } catch (const BackendError& e) {
        throw ConversationTransportError(e, transcript_);
      }
    }
    if (reply.empty())
      throw ProtocolError("empty reply from " + std::string(to_string(agent.role)) + " in round " +
                          std::to_string(round));
    agent.history = request;
    agent.history.push_back({"assistant", reply});
    transcript_.turns.push_back({agent.role, addressee, kind, reply, round, std::move(request)});
    return reply;
  }

 private:
  const PromptPack& pack_;
  const CaptionerOptions& options_;
  ChatModel& chat_;
  Transcript& transcript_;
};

}  // namespace

PromptPack PromptPack::parse(std::string_view text) {
  PromptPack pack;
  std::string current;
  std::string body;
  bool in_section = false;
  auto flush = [&] {
    if (!in_section) return;
    auto trimmed = std::string(trim(body));
    if (!pack.sections_.emplace(current, trimmed).second)
      throw ConfigError("prompt pack repeats section '" + current + "'");
  };
  for (const auto& line : split(text, '\n')) {
    if (line.rfind("@@", 0) == 0) {
      flush();
      current = std::string(trim(std::string_view(line).substr(2)));
      if (current.empty()) throw ConfigError("prompt pack section without a key");
      body.clear();
      in_section = true;
    } else if (in_section) {
      body += line;
      body += '\n';
    } else if (!trim(line).empty() && trim(line).front() != '#') {
      throw ConfigError("prompt pack text outside a section: " + line);
    }
  }
  flush();
  for (auto key : kRequiredSections)
    if (!pack.sections_.count(key)) throw ConfigError("prompt pack lacks section '" + std::string(key) + "'");
  return pack;
}

const PromptPack& PromptPack::seeded() {
  static const PromptPack pack = parse(embedded::prompt_pack);
  return pack;
}

const std::string& PromptPack::get(std::string_view key) const {
  auto it = sections_.find(key);
  if (it == sections_.end()) throw ConfigError("prompt pack lacks section '" + std::string(key) + "'");
  return it->second;
}

std::vector<std::string> PromptPack::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : sections_) out.push_back(k);
  return out;
}

std::map<std::string, std::string> persona_bindings(PersonaRole role, const PromptSpec& spec) {
  switch (role) {
    case PersonaRole::CountryAgent:
      return {{"country", spec.person_country}, {"demonym", spec.demonym}, {"a_demonym", with_article(spec.demonym)}};
    case PersonaRole::AgeGenderAgent: {
      std::string gender = to_lower(to_string(spec.gender));
      return {{"person", with_article(age_gender_noun(spec.age, spec.gender))},
              {"age_gender", with_article(std::string(age_adjective(spec.age)) + " " + gender)}};
    }
    case PersonaRole::LandmarkAgent:
      return {{"landmark", spec.landmark}, {"landmark_country", spec.landmark_country}};
    case PersonaRole::Summarizer: break;
  }
  throw ConfigError("the summarizer has no persona bindings");
}

Captioner::Captioner(const PromptPack& pack, const Tokenizer& tokenizer, CaptionerOptions options)
    : pack_(pack), tokenizer_(tokenizer), options_(options) {
  if (options_.rounds < 1) throw ConfigError("conversation needs at least one round");
  if (options_.token_budget < 1) throw ConfigError("token budget must be positive");
}

std::vector<TaskAssignment> Captioner::moderate(const PromptSpec& spec) const {
  static constexpr std::array<std::pair<PersonaRole, std::string_view>, 3> kTasks{{
      {PersonaRole::CountryAgent, "moderator.country"},
      {PersonaRole::AgeGenderAgent, "moderator.age_gender"},
      {PersonaRole::LandmarkAgent, "moderator.landmark"},
  }};
  std::vector<TaskAssignment> out;
  for (const auto& [role, key] : kTasks) {
    auto text = render_template(pack_.get(key), persona_bindings(role, spec));
    auto left = unresolved_placeholders(text);
    if (!left.empty())
      throw ConfigError("template '" + std::string(key) + "' leaves " + join(left, ", ") + " unresolved");
    out.push_back({role, std::move(text), spec.id});
  }
  return out;
}

Transcript Captioner::run_conversation(const PromptSpec& spec, ChatModel& chat) const {
  Transcript transcript;
  transcript.spec_id = base_spec_id(spec);
  transcript.backend_fingerprint = chat.fingerprint();
  transcript.tokenizer = tokenizer_.name();
  Conversation conv(pack_, options_, chat, transcript);

  Agent country{PersonaRole::CountryAgent, persona_bindings(PersonaRole::CountryAgent, spec), {}, {}};
  Agent age_gender{PersonaRole::AgeGenderAgent, persona_bindings(PersonaRole::AgeGenderAgent, spec), {}, {}};
  Agent landmark{PersonaRole::LandmarkAgent, persona_bindings(PersonaRole::LandmarkAgent, spec), {}, {}};
  auto agent_for = [&](PersonaRole role) -> Agent& {
    switch (role) {
      case PersonaRole::CountryAgent: return country;
      case PersonaRole::AgeGenderAgent: return age_gender;
      default: return landmark;
    }
  };

  for (const auto& task : moderate(spec)) {
    Agent& agent = agent_for(task.target);
    conv.start(agent);
    auto vars = agent.vars;
    vars["task"] = task.instruction;
    agent.description = conv.ask(agent, conv.render("initial", vars, agent.role), TurnKind::InitialDescription,
                                 std::nullopt, 0);
  }

  struct Exchange {
    PersonaRole asker;
    PersonaRole asked;
    std::string_view question_key;
  };
  static constexpr std::array<Exchange, 3> kSchedule{{
      {PersonaRole::AgeGenderAgent, PersonaRole::CountryAgent, "question.age_gender_to_country"},
      {PersonaRole::CountryAgent, PersonaRole::LandmarkAgent, "question.country_to_landmark"},
      {PersonaRole::CountryAgent, PersonaRole::AgeGenderAgent, "question.country_to_age_gender"},
  }};

  for (int round = 1; round <= options_.rounds; ++round) {
    for (const auto& ex : kSchedule) {
      Agent& asker = agent_for(ex.asker);
      Agent& asked = agent_for(ex.asked);
      auto question =
          conv.ask(asker, conv.render(ex.question_key, asker.vars, asker.role), TurnKind::Question, ex.asked, round);

      auto answer_vars = asked.vars;
      answer_vars["question"] = question;
      auto answer = conv.ask(asked, conv.render("answer", answer_vars, asked.role), TurnKind::Answer, ex.asker, round);

      auto refine_vars = asker.vars;
      refine_vars["answer"] = answer;
      refine_vars["description"] = asker.description;
      asker.description = conv.ask(asker, conv.render("refine", refine_vars, asker.role), TurnKind::Refinement,
                                   std::nullopt, round);
    }
  }

  SummaryResult summary;
  try {
    summary = summarize({country.description, age_gender.description, landmark.description}, chat);
  } catch (const BackendError& e) {
    throw ConversationTransportError(e, transcript);
  }
  transcript.turns.push_back(
      {PersonaRole::Summarizer, std::nullopt, TurnKind::Summary, summary.caption, options_.rounds, summary.prompt});
  transcript.final_caption = summary.caption;
  transcript.token_count = summary.token_count;
  transcript.truncated = summary.truncated;
  transcript.summary_attempts = summary.attempts;
  return transcript;
}

SummaryResult Captioner::summarize(const std::array<std::string, 3>& descriptions, ChatModel& chat) const {
  for (const auto& d : descriptions)
    if (trim(d).empty()) throw ProtocolError("summarizer needs three non-empty descriptions");
  const std::size_t budget = options_.token_budget;
  SummaryResult result;
  std::optional<std::pair<std::string, std::vector<ChatMessage>>> over_budget;
  const int attempts = std::max(1, options_.summary_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    // Each re-prompt asks for a fifth less than the previous request.
    std::size_t requested = std::max<std::size_t>(1, budget - attempt * (budget / 5));
    std::map<std::string, std::string> vars{{"country_description", descriptions[0]},
                                            {"age_gender_description", descriptions[1]},
                                            {"landmark_description", descriptions[2]},
                                            {"budget", std::to_string(requested)}};
    std::vector<ChatMessage> request{
        {"system", render_template(pack_.get("summarizer.system"), vars)},
        {"user", render_template(pack_.get("summarize"), vars)},
    };
    auto left = unresolved_placeholders(request[1].text);
    if (!left.empty()) throw ConfigError("summarize template leaves " + join(left, ", ") + " unresolved");
    std::string reply(trim(chat.send(request)));
    result.attempts = attempt + 1;
    if (reply.empty()) continue;
    auto tokens = tokenizer_.count(reply);
    if (tokens <= budget) {
      result.caption = std::move(reply);
      result.token_count = tokens;
      result.prompt = std::move(request);
      return result;
    }
    over_budget.emplace(std::move(reply), std::move(request));
  }
  if (!over_budget) throw ProtocolError("summarizer returned only empty replies");
  result.caption = tokenizer_.truncate(over_budget->first, budget);
  result.token_count = tokenizer_.count(result.caption);
  result.truncated = true;
  result.prompt = std::move(over_budget->second);
  return result;
}

CaptionProgress caption_matrix(std::span<const PromptSpec> specs, ChatModel& chat, RunStore& store,
                               const Captioner& captioner, int workers) {
  std::vector<const PromptSpec*> unique;
  {
    std::set<std::string> seen;
    for (const auto& s : specs)
      if (seen.insert(base_spec_id(s)).second) unique.push_back(&s);
  }
  CaptionProgress progress;
  std::mutex mutex;
  parallel_for(unique.size(), workers, [&](std::size_t i) {
    const PromptSpec& spec = *unique[i];
    auto id = base_spec_id(spec);
    try {
      if (store.get_transcript(id)) {
        std::lock_guard lock(mutex);
        ++progress.skipped;
        return;
      }
      auto transcript = captioner.run_conversation(spec, chat);
      store.put_transcript(transcript);
      std::lock_guard lock(mutex);
      ++progress.completed;
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex);
      ++progress.failed;
      progress.failures.emplace_back(id, e.what());
    }
  });
  std::sort(progress.failures.begin(), progress.failures.end());
  return progress;
}

}  // namespace mosaig
