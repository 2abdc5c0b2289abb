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

#ifndef MOSAIG_SCORING_HPP_
#define MOSAIG_SCORING_HPP_

#include <Eigen/Dense>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mosaig/backends.hpp"
#include "mosaig/records.hpp"
#include "mosaig/swapgen.hpp"

namespace mosaig {

class RunStore;

// CLIPScore: cosine of the text and image embeddings, in [-1, 1].
double alignment(std::string_view caption, const Image& image, ScoreBackend& scorer);

// Set-level quality over classifier distributions (one row per image).
double inception_score(const Eigen::MatrixXd& distributions, int splits = 1);
double inception_score(std::span<const Image> images, ScoreBackend& scorer, int splits = 1);
// Stacks distributions into rows, checking they share a class count.
Eigen::MatrixXd stack_distributions(std::span<const std::vector<double>> rows);

// Backend rating; InvariantViolation outside [1, 10].
double aesthetic(const Image& image, ScoreBackend& scorer);

// Text-level forms: |S(c, I) - S(c', I')| and S(c, I) - S(c', I).
double fairness_delta(std::string_view caption, const Image& image, std::string_view swapped_caption,
                      const Image& swapped_image, ScoreBackend& scorer);
double knowledge_delta(std::string_view caption, std::string_view swapped_caption, const Image& image,
                       ScoreBackend& scorer);

// Resolves the image and caption texts behind a swap pair.
struct PairContext {
  const RunStore& store;
  ScoreBackend& scorer;
  CaptionMode mode = CaptionMode::Simple;
  // Needed when the pair's language is not English.
  Translator* translator = nullptr;
};

// |S(c, I) - S(c', I')|; c is the caption the original image was generated
// from, c' the swapped caption in the pair's language.
double fairness_delta(const SwapPair& pair, const PairContext& ctx);
// S(c, I) - S(c', I) on the original image; may be negative.
double knowledge_delta(const SwapPair& pair, const PairContext& ctx);

struct ScoreRunOptions {
  std::set<Metric> metrics{Metric::Alignment, Metric::Quality, Metric::Aesthetic};
  std::vector<SwapKind> fairness_kinds{SwapKind::Gender, SwapKind::Age, SwapKind::Nationality};
  CaptionMode mode = CaptionMode::Simple;
  std::string model;  // label stamped on every record, e.g. "flux-M"
  int splits = 1;
  int workers = 1;
  Translator* translator = nullptr;
};

struct ScoreSummary {
  std::size_t written = 0;
  std::size_t skipped = 0;       // already persisted
  std::size_t failed = 0;
  std::size_t inapplicable = 0;  // captions the swap lexicon could not rewrite
  std::vector<std::pair<std::string, std::string>> failures;
};

// Scores every persisted image of the mode. Idempotent per score key.
ScoreSummary score_run(RunStore& store, ScoreBackend& scorer, const ScoreRunOptions& options);

}  // namespace mosaig

#endif  // MOSAIG_SCORING_HPP_
