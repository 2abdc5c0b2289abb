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

#include "mosaig/tokenizer.hpp"

#include <cctype>

#include "mosaig/errors.hpp"

namespace mosaig {

namespace {

enum class CharClass { Space, Letter, Digit, Punct };

CharClass classify(unsigned char c) {
  if (c >= 0x80 || std::isalpha(c)) return CharClass::Letter;
  if (std::isdigit(c)) return CharClass::Digit;
  if (std::isspace(c)) return CharClass::Space;
  return CharClass::Punct;
}

}  // namespace

std::string Tokenizer::truncate(std::string_view text, std::size_t max_tokens) const {
  auto spans = token_spans(text);
  if (spans.size() <= max_tokens) return std::string(text);
  if (max_tokens == 0) return {};
  return std::string(text.substr(0, spans[max_tokens - 1].second));
}

std::vector<std::pair<std::size_t, std::size_t>> WordPunctTokenizer::token_spans(std::string_view text) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto cls = classify(static_cast<unsigned char>(text[i]));
    if (cls == CharClass::Space) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (cls != CharClass::Punct)
      while (j < text.size() && classify(static_cast<unsigned char>(text[j])) == cls) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
  if (name.empty() || name == "word-punct-v1") return std::make_unique<WordPunctTokenizer>();
  throw ConfigError("unknown tokenizer '" + std::string(name) + "'");
}

}  // namespace mosaig
