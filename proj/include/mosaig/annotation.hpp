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

#ifndef MOSAIG_ANNOTATION_HPP_
#define MOSAIG_ANNOTATION_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mosaig/analysis.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/records.hpp"

namespace mosaig {

class RunStore;

struct LikertQuestion {
  std::string key;  // alignment | quality | aesthetics
  std::string prompt;
  std::array<std::string, 5> options;  // option i is rating i + 1
};

struct QuestionSet {
  std::string version;
  std::array<LikertQuestion, 3> questions;
};

const QuestionSet& question_set();
std::string question_set_json();

// Images offered for annotation: one run, labelled with its model setting.
struct AnnotationSource {
  const RunStore* store = nullptr;
  std::string model;  // e.g. "flux-M"
};

struct TaskSampleOptions {
  std::size_t sample_size = 300;
  // Joint strata over these axes; the model axis ranges over source labels.
  std::vector<Axis> axes{Axis::Model};
  std::uint64_t seed = 0;
};

struct Shortfall {
  std::string stratum;  // e.g. "model=flux-M,gender=Female"
  std::size_t needed = 0;
  std::size_t available = 0;
};

class ShortfallError : public ValidationError {
 public:
  explicit ShortfallError(std::vector<Shortfall> shortfalls);
  const std::vector<Shortfall>& shortfalls() const { return shortfalls_; }

 private:
  std::vector<Shortfall> shortfalls_;
};

// Stratified, seeded sample; the size is rounded down to a multiple of the
// stratum count. Throws ShortfallError if any stratum is too small.
std::vector<AnnotationTask> create_tasks(std::span<const AnnotationSource> sources, const TaskSampleOptions& options);

// Validates ids: 1-64 characters from [A-Za-z0-9_.-].
bool valid_annotator_id(std::string_view id);

class AnnotationService {
 public:
  // `store` holds tasks and annotations; `image_stores` resolve image hashes
  // (the task store is always searched first).
  AnnotationService(RunStore& store, std::vector<const RunStore*> image_stores = {}, std::uint64_t seed = 0,
                    std::vector<std::string> annotators = {});

  // Lowest-indexed unanswered task in the annotator's seeded order.
  std::optional<AnnotationTask> next_task(const std::string& annotator);

  enum class SubmitStatus { Stored, Duplicate };
  // ValidationError (range, annotator), NotFoundError (task), ConflictError.
  SubmitStatus submit(AnnotationRecord record);

  std::size_t task_count() const { return tasks_.size(); }
  std::map<std::string, std::size_t> progress() const;
  std::optional<std::vector<std::uint8_t>> image(const std::string& content_hash) const;
  // Seeded presentation order (indices into the task list).
  std::vector<std::size_t> order_for(const std::string& annotator) const;

 private:
  void check_annotator(const std::string& id) const;

  RunStore& store_;
  std::vector<const RunStore*> image_stores_;
  std::uint64_t seed_;
  std::vector<std::string> annotators_;
  std::vector<AnnotationTask> tasks_;
  std::map<std::string, std::size_t> task_index_;
};

struct PairAgreement {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t paired = 0;
  // alignment, quality, aesthetics; nullopt when kappa is undefined.
  std::array<std::optional<double>, 3> kappa;
};

// Per-question rating vectors over the tasks both annotators rated, ordered
// by task id. Index 0 alignment, 1 quality, 2 aesthetics.
struct PairedRatings {
  std::vector<std::string> task_ids;
  std::array<std::vector<int>, 3> a;
  std::array<std::vector<int>, 3> b;
};
PairedRatings paired_ratings(std::span<const AnnotationRecord> records, const std::string& a, const std::string& b);
std::vector<PairAgreement> pairwise_agreement(std::span<const AnnotationRecord> records,
                                              metrics::KappaWeighting weighting = metrics::KappaWeighting::Quadratic);

// REST front end; httplib stays out of this header.
class AnnotationServer {
 public:
  AnnotationServer(AnnotationService& service, std::string token = {});
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mosaig

#endif  // MOSAIG_ANNOTATION_HPP_
