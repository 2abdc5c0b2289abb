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

#ifndef MOSAIG_SWAPGEN_HPP_
#define MOSAIG_SWAPGEN_HPP_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mosaig/matrix.hpp"
#include "mosaig/records.hpp"
#include "mosaig/vocabulary.hpp"

namespace mosaig {

// Per-attribute substitution table. Each row is one concept ("child noun",
// "demonym") with one token per attribute value; swapping value A for B
// replaces every row's A-token with its B-token.
class Lexicon {
 public:
  struct Row {
    SwapKind kind;
    std::string concept_name;
    std::map<std::string, std::string> tokens;  // attribute value -> token
  };

  // Gender and age rows come from the text; nationality (demonym) and
  // landmark rows are generated from the vocabulary.
  static Lexicon parse(std::string_view text, const Vocabulary& vocab);
  static const Lexicon& seeded();

  // (from, to) token pairs, longest `from` first.
  std::vector<std::pair<std::string, std::string>> substitutions(SwapKind kind, std::string_view from,
                                                                 std::string_view to) const;
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
};

// The spec's value on the swapped axis: "Female", "Child", "Germany", "Taj Mahal".
std::string attribute_value(const PromptSpec& spec, SwapKind kind);

// Replaces every whole-word occurrence of the spec's attribute tokens with
// the target value's tokens, preserving leading capitalization; all other
// bytes are untouched. Throws SwapInapplicableError when no token occurs.
std::string swap_caption(std::string_view caption, const PromptSpec& spec, SwapKind kind, std::string_view target,
                         const Lexicon& lexicon = Lexicon::seeded());

enum class ImagePolicy { UseSwappedImage, UseOriginalImage };

struct SwapPair {
  SwapKind kind = SwapKind::Gender;
  std::string original_spec_id;
  std::optional<std::string> swapped_spec_id;  // absent for landmark swaps
  std::string target_value;
  std::string language = "en";   // caption language of both sides
  std::string original_caption;  // English source caption
  std::string swapped_caption;
  ImagePolicy image_policy = ImagePolicy::UseSwappedImage;
};

struct SwapContext {
  const Vocabulary& vocab;
  std::span<const PromptSpec> run_specs;
  CaptionMode mode = CaptionMode::Simple;
  // Whether the run already holds an image for a spec id.
  std::function<bool(const std::string&)> has_image;
  const Lexicon& lexicon = Lexicon::seeded();
};

// English source caption for the mode; IncompleteMatrixError when a
// multi-agent caption has not been produced yet.
const std::string& source_caption(const PromptSpec& spec, CaptionMode mode);

// One pair per alternative value. Demographic swaps pair with the run's
// counterpart cell (alternatives come from the values present in the run,
// so the full matrix gives 1 gender, 2 age and 4 nationality pairs);
// landmark swaps range over every other vocabulary landmark and keep the
// original image. IncompleteMatrixError lists counterparts without images.
std::vector<SwapPair> enumerate_swaps(const PromptSpec& spec, SwapKind kind, const SwapContext& context);

}  // namespace mosaig

#endif  // MOSAIG_SWAPGEN_HPP_
