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

#include "mosaig/scoring.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "mosaig/errors.hpp"
#include "mosaig/image.hpp"
#include "mosaig/metrics.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/util.hpp"
#include "mosaig/vocabulary.hpp"

namespace mosaig {

double alignment(std::string_view caption, const Image& image, ScoreBackend& scorer) {
  return metrics::cosine_similarity(scorer.embed_text(caption), scorer.embed_image(image));
}

double inception_score(const Eigen::MatrixXd& distributions, int splits) {
  return metrics::inception_score(distributions, splits);
}

Eigen::MatrixXd stack_distributions(std::span<const std::vector<double>> rows) {
  if (rows.empty()) return {};
  const auto k = rows.front().size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k) throw InvariantViolation("classifier outputs disagree on class count");
    for (std::size_t j = 0; j < k; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return out;
}

double inception_score(std::span<const Image> images, ScoreBackend& scorer, int splits) {
  std::vector<std::vector<double>> rows;
  for (const auto& img : images) {
    Eigen::VectorXd p = scorer.classify(img);
    rows.emplace_back(p.data(), p.data() + p.size());
  }
  return inception_score(stack_distributions(rows), splits);
}

double aesthetic(const Image& image, ScoreBackend& scorer) {
  const double v = scorer.aesthetic(image);
  if (!(v >= 1.0 && v <= 10.0))
    throw InvariantViolation("aesthetic score " + format_double(v) + " outside [1, 10]");
  return v;
}

double fairness_delta(std::string_view caption, const Image& image, std::string_view swapped_caption,
                      const Image& swapped_image, ScoreBackend& scorer) {
  return std::abs(alignment(caption, image, scorer) - alignment(swapped_caption, swapped_image, scorer));
}

double knowledge_delta(std::string_view caption, std::string_view swapped_caption, const Image& image,
                       ScoreBackend& scorer) {
  const Eigen::VectorXd e = scorer.embed_image(image);
  return metrics::cosine_similarity(scorer.embed_text(caption), e) -
         metrics::cosine_similarity(scorer.embed_text(swapped_caption), e);
}

namespace {

Image load_image(const RunStore& store, const std::string& spec_id, CaptionMode mode) {
  auto rec = store.get_image(spec_id, mode);
  if (!rec) throw IncompleteMatrixError({spec_id});
  return decode_png(store.read_image_bytes(*rec));
}

// Shares image embeddings and original similarities across the many pairs
// that reference one image.
class PairScorer {
 public:
  explicit PairScorer(const PairContext& ctx) : ctx_(ctx) {}

  double original_similarity(const std::string& spec_id) {
    {
      std::lock_guard lock(mu_);
      if (auto it = similarity_.find(spec_id); it != similarity_.end()) return it->second;
    }
    auto rec = ctx_.store.get_image(spec_id, ctx_.mode);
    if (!rec) throw IncompleteMatrixError({spec_id});
    const double s = metrics::cosine_similarity(ctx_.scorer.embed_text(rec->caption), image_embedding(spec_id));
    std::lock_guard lock(mu_);
    similarity_[spec_id] = s;
    return s;
  }

  Eigen::VectorXd image_embedding(const std::string& spec_id) {
    {
      std::lock_guard lock(mu_);
      if (auto it = embeddings_.find(spec_id); it != embeddings_.end()) return it->second;
    }
    Eigen::VectorXd e = ctx_.scorer.embed_image(load_image(ctx_.store, spec_id, ctx_.mode));
    std::lock_guard lock(mu_);
    embeddings_[spec_id] = e;
    return e;
  }

  std::string swapped_text(const SwapPair& pair) {
    if (pair.language == "en") return pair.swapped_caption;
    if (!ctx_.translator) throw ConfigError("a translator is required to score " + pair.language + " swaps");
    return ctx_.translator->translate(pair.swapped_caption, "en", pair.language);
  }

  double fairness(const SwapPair& pair) {
    if (!pair.swapped_spec_id) throw ValidationError("fairness pair without a counterpart spec");
    const double s = original_similarity(pair.original_spec_id);
    const double s2 = metrics::cosine_similarity(ctx_.scorer.embed_text(swapped_text(pair)),
                                                 image_embedding(*pair.swapped_spec_id));
    return std::abs(s - s2);
  }

  double knowledge(const SwapPair& pair) {
    const double s = original_similarity(pair.original_spec_id);
    const double s2 = metrics::cosine_similarity(ctx_.scorer.embed_text(swapped_text(pair)),
                                                 image_embedding(pair.original_spec_id));
    return s - s2;
  }

 private:
  const PairContext& ctx_;
  std::mutex mu_;
  std::unordered_map<std::string, Eigen::VectorXd> embeddings_;
  std::unordered_map<std::string, double> similarity_;
};

}  // namespace

double fairness_delta(const SwapPair& pair, const PairContext& ctx) { return PairScorer(ctx).fairness(pair); }

double knowledge_delta(const SwapPair& pair, const PairContext& ctx) { return PairScorer(ctx).knowledge(pair); }

ScoreSummary score_run(RunStore& store, ScoreBackend& scorer, const ScoreRunOptions& options) {
  if (options.model.empty()) throw ConfigError("score_run needs a model label");
  ScoreSummary summary;
  std::mutex mu;
  const std::string fp = scorer.fingerprint();
  const auto specs = store.specs();
  std::unordered_set<std::string> imaged;
  for (const auto& r : store.images())
    if (r.mode == options.mode) imaged.insert(r.spec_id);

  std::unordered_set<std::string> classified;
  for (const auto& c : store.classifications())
    if (c.mode == options.mode && c.model == options.model) classified.insert(c.spec_id);

  auto base = [&](const std::string& spec_id, Metric m) {
    ScoreRecord r;
    r.spec_id = spec_id;
    r.metric = m;
    r.mode = options.mode;
    r.model = options.model;
    r.scorer_fingerprint = fp;
    return r;
  };
  auto commit = [&](const ScoreRecord& r) {
    const bool wrote = store.put_score(r);
    std::lock_guard lock(mu);
    (wrote ? summary.written : summary.skipped)++;
  };
  auto fail = [&](const std::string& id, const std::string& what) {
    std::lock_guard lock(mu);
    summary.failed++;
    summary.failures.emplace_back(id, what);
  };

  const bool want_quality = options.metrics.count(Metric::Quality) > 0;
  const bool want_fairness = options.metrics.count(Metric::Fairness) > 0;
  const bool want_knowledge = options.metrics.count(Metric::Knowledge) > 0;

  PairContext ctx{store, scorer, options.mode, options.translator};
  PairScorer pairs(ctx);
  SwapContext swap_ctx{Vocabulary::seeded(), specs, options.mode,
                       [&](const std::string& id) { return imaged.count(id) > 0; }};

  parallel_for(specs.size(), options.workers, [&](std::size_t i) {
    const auto& spec = specs[i];
    if (!imaged.count(spec.id)) return;
    try {
      std::optional<Image> img;
      auto image = [&]() -> const Image& {
        if (!img) img = load_image(store, spec.id, options.mode);
        return *img;
      };
      if (options.metrics.count(Metric::Alignment)) {
        auto r = base(spec.id, Metric::Alignment);
        if (store.has_score(score_key(r))) {
          std::lock_guard lock(mu);
          summary.skipped++;
        } else {
          r.value = pairs.original_similarity(spec.id);
          commit(r);
        }
      }
      if (options.metrics.count(Metric::Aesthetic)) {
        auto r = base(spec.id, Metric::Aesthetic);
        if (store.has_score(score_key(r))) {
          std::lock_guard lock(mu);
          summary.skipped++;
        } else {
          r.value = aesthetic(image(), scorer);
          commit(r);
        }
      }
      if (want_quality && !classified.count(spec.id)) {
        Eigen::VectorXd p = scorer.classify(image());
        metrics::check_distributions(p.transpose());
        store.put_classification({spec.id, options.mode, options.model,
                                  std::vector<double>(p.data(), p.data() + p.size()), fp});
      }
    } catch (const Error& e) {
      fail(spec.id, e.what());
    }

    auto score_pairs = [&](SwapKind kind, Metric metric) {
      std::vector<SwapPair> list;
      try {
        list = enumerate_swaps(spec, kind, swap_ctx);
      } catch (const SwapInapplicableError&) {
        std::lock_guard lock(mu);
        summary.inapplicable++;
        return;
      } catch (const Error& e) {
        fail(spec.id, e.what());
        return;
      }
      for (const auto& pair : list) {
        auto r = base(spec.id, metric);
        r.swap_kind = kind;
        r.swap_target = pair.target_value;
        r.counterpart_spec_id = pair.swapped_spec_id;
        if (store.has_score(score_key(r))) {
          std::lock_guard lock(mu);
          summary.skipped++;
          continue;
        }
        try {
          r.value = metric == Metric::Fairness ? pairs.fairness(pair) : pairs.knowledge(pair);
          commit(r);
        } catch (const Error& e) {
          fail(spec.id + "/" + pair.target_value, e.what());
        }
      }
    };
    if (want_fairness)
      for (auto kind : options.fairness_kinds) score_pairs(kind, Metric::Fairness);
    if (want_knowledge) score_pairs(SwapKind::Landmark, Metric::Knowledge);
  });

  if (want_quality) {
    auto r = base(std::string(kImageSetId), Metric::Quality);
    if (store.has_score(score_key(r))) {
      summary.skipped++;
    } else if (auto missing = store.missing(Stage::Images, options.mode); !missing.empty()) {
      summary.failed++;
      summary.failures.emplace_back(std::string(kImageSetId),
                                    std::to_string(missing.size()) + " images missing; quality deferred");
    } else {
      std::vector<std::vector<double>> rows;
      for (const auto& c : store.classifications())
        if (c.mode == options.mode && c.model == options.model) rows.push_back(c.probabilities);
      try {
        r.value = inception_score(stack_distributions(rows), options.splits);
        commit(r);
      } catch (const Error& e) {
        fail(std::string(kImageSetId), e.what());
      }
    }
  }
  return summary;
}

}  // namespace mosaig
