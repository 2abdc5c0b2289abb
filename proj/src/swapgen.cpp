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

#include "mosaig/swapgen.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mosaig/embedded_data.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

namespace {

bool word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '-';
}

bool matches_at(std::string_view text, std::size_t pos, std::string_view token) {
  if (pos + token.size() > text.size()) return false;
  for (std::size_t k = 0; k < token.size(); ++k)
    if (std::tolower(static_cast<unsigned char>(text[pos + k])) != std::tolower(static_cast<unsigned char>(token[k])))
      return false;
  std::size_t end = pos + token.size();
  return end == text.size() || !word_char(text[end]);
}

std::string match_case(std::string_view original, std::string_view replacement) {
  std::string out(replacement);
  if (!original.empty() && !out.empty() && std::isupper(static_cast<unsigned char>(original.front())))
    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  return out;
}

std::vector<std::string> axis_values(SwapKind kind, const Vocabulary& vocab) {
  std::vector<std::string> out;
  switch (kind) {
    case SwapKind::Gender:
      for (auto g : kGenders) out.emplace_back(to_string(g));
      break;
    case SwapKind::Age:
      for (auto a : kAgeGroups) out.emplace_back(to_string(a));
      break;
    case SwapKind::Nationality:
      out = vocab.country_names();
      break;
    case SwapKind::Landmark:
      for (const auto& l : vocab.landmarks()) out.push_back(l.name);
      break;
  }
  return out;
}

PromptSpec with_value(const PromptSpec& spec, SwapKind kind, const std::string& value, const Vocabulary& vocab) {
  auto age = spec.age;
  auto gender = spec.gender;
  auto country = spec.person_country;
  auto landmark = spec.landmark;
  switch (kind) {
    case SwapKind::Gender: gender = parse_gender(value); break;
    case SwapKind::Age: age = parse_age_group(value); break;
    case SwapKind::Nationality: country = value; break;
    case SwapKind::Landmark: landmark = value; break;
  }
  return make_spec(vocab, age, gender, country, landmark, spec.language);
}

}  // namespace

Lexicon Lexicon::parse(std::string_view text, const Vocabulary& vocab) {
  Lexicon lex;
  int lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    auto line = std::string(trim(raw));
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    auto where = "lexicon line " + std::to_string(lineno);
    if (fields.size() < 4) throw ConfigError(where + ": expected attribute, concept and at least two tokens");
    Row row{parse_swap_kind(fields[0]), fields[1], {}};
    if (row.kind != SwapKind::Gender && row.kind != SwapKind::Age)
      throw ConfigError(where + ": only gender and age rows are listed explicitly");
    for (std::size_t i = 2; i < fields.size(); ++i) {
      auto eq = fields[i].find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected value=token");
      auto value = fields[i].substr(0, eq);
      auto token = fields[i].substr(eq + 1);
      if (row.kind == SwapKind::Gender) value = std::string(to_string(parse_gender(value)));
      else value = std::string(to_string(parse_age_group(value)));
      if (token.empty()) throw ConfigError(where + ": empty token");
      row.tokens[value] = token;
    }
    lex.rows_.push_back(std::move(row));
  }
  Row demonyms{SwapKind::Nationality, "demonym", {}};
  for (const auto& c : vocab.countries()) demonyms.tokens[c.name] = c.demonym;
  lex.rows_.push_back(std::move(demonyms));
  Row names{SwapKind::Landmark, "name", {}};
  for (const auto& l : vocab.landmarks()) names.tokens[l.name] = l.name;
  lex.rows_.push_back(std::move(names));
  return lex;
}

const Lexicon& Lexicon::seeded() {
  static const Lexicon lex = parse(embedded::lexicon, Vocabulary::seeded());
  return lex;
}

std::vector<std::pair<std::string, std::string>> Lexicon::substitutions(SwapKind kind, std::string_view from,
                                                                        std::string_view to) const {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  for (const auto& row : rows_) {
    if (row.kind != kind) continue;
    auto f = row.tokens.find(std::string(from));
    auto t = row.tokens.find(std::string(to));
    if (f == row.tokens.end() || t == row.tokens.end()) continue;
    if (seen.insert(to_lower(f->second)).second) out.emplace_back(f->second, t->second);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  return out;
}

std::string attribute_value(const PromptSpec& spec, SwapKind kind) {
  switch (kind) {
    case SwapKind::Gender: return std::string(to_string(spec.gender));
    case SwapKind::Age: return std::string(to_string(spec.age));
    case SwapKind::Nationality: return spec.person_country;
    case SwapKind::Landmark: return spec.landmark;
  }
  return {};
}

std::string swap_caption(std::string_view caption, const PromptSpec& spec, SwapKind kind, std::string_view target,
                         const Lexicon& lexicon) {
  const auto source = attribute_value(spec, kind);
  if (source == target) throw ValidationError("swap target equals the spec's own " + std::string(to_string(kind)));
  auto subs = lexicon.substitutions(kind, source, target);
  if (subs.empty())
    throw ConfigError("no " + std::string(to_string(kind)) + " substitutions from '" + source + "' to '" +
                      std::string(target) + "'");
  std::string out;
  out.reserve(caption.size() + 16);
  std::size_t replaced = 0;
  std::size_t i = 0;
  while (i < caption.size()) {
    bool at_start = i == 0 || !word_char(caption[i - 1]);
    bool hit = false;
    if (at_start) {
      for (const auto& [from, to] : subs) {
        if (matches_at(caption, i, from)) {
          out += match_case(caption.substr(i, from.size()), to);
          i += from.size();
          ++replaced;
          hit = true;
          break;
        }
      }
    }
    if (!hit) out.push_back(caption[i++]);
  }
  if (replaced == 0)
    throw SwapInapplicableError("caption has no " + std::string(to_string(kind)) + " token for '" + source + "'");
  return out;
}

const std::string& source_caption(const PromptSpec& spec, CaptionMode mode) {
  if (mode == CaptionMode::Simple) return spec.simple_caption;
  if (!spec.agentic_caption) throw IncompleteMatrixError({spec.id});
  return *spec.agentic_caption;
}

std::vector<SwapPair> enumerate_swaps(const PromptSpec& spec, SwapKind kind, const SwapContext& context) {
  const auto& caption = source_caption(spec, context.mode);
  const auto own = attribute_value(spec, kind);
  std::vector<SwapPair> out;

  if (kind == SwapKind::Landmark) {
    for (const auto& value : axis_values(kind, context.vocab)) {
      if (value == own) continue;
      out.push_back({kind, spec.id, std::nullopt, value, spec.language, caption,
                     swap_caption(caption, spec, kind, value, context.lexicon), ImagePolicy::UseOriginalImage});
    }
    return out;
  }

  std::set<std::string> present;
  std::set<std::string> run_ids;
  for (const auto& s : context.run_specs) {
    present.insert(attribute_value(s, kind));
    run_ids.insert(s.id);
  }
  std::vector<std::string> missing;
  for (const auto& value : axis_values(kind, context.vocab)) {
    if (value == own || !present.count(value)) continue;
    auto counterpart = with_value(spec, kind, value, context.vocab);
    if (!run_ids.count(counterpart.id)) continue;
    if (context.has_image && !context.has_image(counterpart.id)) {
      missing.push_back(counterpart.id);
      continue;
    }
    out.push_back({kind, spec.id, counterpart.id, value, spec.language, caption,
                   swap_caption(caption, spec, kind, value, context.lexicon), ImagePolicy::UseSwappedImage});
  }
  if (!missing.empty()) throw IncompleteMatrixError(std::move(missing));
  return out;
}

}  // namespace mosaig
