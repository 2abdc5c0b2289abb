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

#ifndef MOSAIG_TOKENIZER_HPP_
#define MOSAIG_TOKENIZER_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mosaig {

// Counts caption tokens for the text-encoder budget.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  // Byte ranges [begin, end) of each token, in order.
  virtual std::vector<std::pair<std::size_t, std::size_t>> token_spans(std::string_view text) const = 0;
  virtual std::string name() const = 0;

  std::size_t count(std::string_view text) const { return token_spans(text).size(); }
  // Cuts after the max_tokens-th token; text with fewer tokens is returned whole.
  std::string truncate(std::string_view text, std::size_t max_tokens) const;
};

// Splits into letter runs (any non-ASCII byte counts as a letter), digit
// runs, and single punctuation characters, which approximates the
// pre-tokenization step of CLIP-style text encoders.
class WordPunctTokenizer final : public Tokenizer {
 public:
  std::vector<std::pair<std::size_t, std::size_t>> token_spans(std::string_view text) const override;
  std::string name() const override { return "word-punct-v1"; }
};

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name);

}  // namespace mosaig

#endif  // MOSAIG_TOKENIZER_HPP_
