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

#ifndef MOSAIG_PIPELINE_HPP_
#define MOSAIG_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mosaig/analysis.hpp"
#include "mosaig/backends.hpp"
#include "mosaig/matrix.hpp"
#include "mosaig/records.hpp"

namespace mosaig {

// Flat "key = value" run configuration. Keys:
//   preset             flux | alt
//   mode               simple | multiagent
//   languages          comma list of language codes
//   rounds             conversation rounds (multiagent)
//   seed               sampling seed (stub backends, annotation order)
//   normalization      minmax | fixed
//   stub               true | false
//   workers            per-command worker pool width
//   cross_cultural_only, ages, genders, countries, landmarks   matrix filters
//   tokenizer          caption-budget tokenizer name
//   model              model label override (default "<preset>-<S|M>")
//   is_splits, quality_ceiling, delta_ceiling
//   corpus_sizes       "en:100,de:20,..." for the language-size correlation
//   compare            other run ids included in the report
//   annotation_sample, annotation_axes, annotators, annotation_token
//   {chat,image,translate,scorer}_url / _token   remote endpoints
struct RunConfig {
  std::string preset = "flux";
  CaptionMode mode = CaptionMode::Simple;
  std::vector<std::string> languages{"en"};
  int rounds = 2;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::MinMaxAcrossModels;
  bool stub = false;
  int workers = 4;
  bool cross_cultural_only = false;
  MatrixFilter filter;
  std::string tokenizer = "word-punct-v1";
  std::string model;
  int is_splits = 1;
  FixedRanges ranges;
  std::map<std::string, double> corpus_sizes;
  std::vector<std::string> compare;
  std::size_t annotation_sample = 300;
  std::vector<Axis> annotation_axes{Axis::Model};
  std::vector<std::string> annotators;
  std::string annotation_token;
  std::map<std::string, std::string> endpoints;  // "chat_url" -> ...

  static RunConfig parse(std::string_view text);
  // Applies one key; ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  // Cross-field invariants: preset languages, chat backend for multiagent.
  void validate() const;
  // Keys that shape the run's data, stored in its manifest.
  std::map<std::string, std::string> snapshot() const;
  std::string model_label() const;
};

// Backends a pipeline talks to; created lazily from the config unless
// injected.
struct Backends {
  std::unique_ptr<ChatModel> chat;
  std::unique_ptr<ImageGenerator> generator;
  std::unique_ptr<Translator> translator;
  std::unique_ptr<ScoreBackend> scorer;
};

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitIncomplete = 3, kExitBackend = 4 };

class Pipeline {
 public:
  Pipeline(std::filesystem::path root, std::string run_id, RunConfig config);
  ~Pipeline();

  void set_backends(Backends backends);

  // Runs one command, printing a one-line JSON summary to `out` and any
  // error to `err`. Returns the exit code.
  int run(std::string_view command, std::ostream& out, std::ostream& err);

  // Commands; each returns its JSON summary and throws on error.
  std::string enumerate();
  std::string caption();
  std::string translate();
  std::string generate();
  std::string score();
  std::string swap_score();
  std::string report();
  // Creates annotation tasks if absent; serves unless port < 0.
  std::string serve_annotation(int port, std::ostream* announce = nullptr);
  std::string agreement();

  std::filesystem::path run_dir() const { return root_ / run_id_; }
  std::filesystem::path report_dir() const { return run_dir() / "report"; }

 private:
  struct State;

  ChatModel& chat();
  ImageGenerator& generator();
  Translator& translator();
  ScoreBackend& scorer();

  std::filesystem::path root_;
  std::string run_id_;
  RunConfig config_;
  std::unique_ptr<State> state_;
};

// Maps an exception to the documented exit codes.
int exit_code_for(const std::exception& e);

}  // namespace mosaig

#endif  // MOSAIG_PIPELINE_HPP_
