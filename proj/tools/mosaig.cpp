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

// mosaig: command-line driver for the caption / generate / score / report
// pipeline and the annotation service.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mosaig/errors.hpp"
#include "mosaig/pipeline.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/util.hpp"

namespace {

const char* kCommands[] = {"enumerate", "caption", "translate",        "generate", "score",
                           "swap-score", "report", "serve-annotation", "agreement"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicultural text-to-image evaluation pipeline"};
  app.set_help_all_flag("--help-all");

  std::string command;
  std::string root = "runs";
  std::string run;
  std::optional<std::string> config_path;
  bool stub = false;
  std::optional<std::string> languages, mode, normalize, preset, compare, ages, genders, countries, landmarks;
  std::optional<int> rounds, workers;
  std::optional<std::uint64_t> seed;
  int port = 8080;
  bool no_serve = false;
  std::vector<std::string> overrides;

  app.add_option("command", command, "Pipeline stage")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kCommands), std::end(kCommands))));
  app.add_option("--root", root, "Directory holding runs")->capture_default_str();
  app.add_option("--run", run, "Run id")->required();
  app.add_option("--config", config_path, "Flat key = value config file");
  app.add_flag("--stub", stub, "Use deterministic stub backends");
  app.add_option("--preset", preset, "Generator preset (flux | alt)");
  app.add_option("--languages", languages, "Comma-separated caption languages");
  app.add_option("--mode", mode, "Caption mode (simple | multiagent)");
  app.add_option("--rounds", rounds, "Conversation rounds");
  app.add_option("--seed", seed, "Sampling seed");
  app.add_option("--normalize", normalize, "Report normalization (minmax | fixed)");
  app.add_option("--workers", workers, "Worker pool width");
  app.add_option("--compare", compare, "Other run ids to include in report / annotation");
  app.add_option("--ages", ages, "Matrix filter: age groups");
  app.add_option("--genders", genders, "Matrix filter: genders");
  app.add_option("--countries", countries, "Matrix filter: person countries");
  app.add_option("--landmarks", landmarks, "Matrix filter: landmarks");
  app.add_option("--port", port, "serve-annotation port (0 picks a free one)")->capture_default_str();
  app.add_flag("--no-serve", no_serve, "serve-annotation: create tasks and exit");
  app.add_option("--set", overrides, "Extra config key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mosaig::kExitConfig;
  }

  mosaig::RunConfig config;
  try {
    if (config_path) {
      auto text = mosaig::read_file(*config_path);
      if (!text) throw mosaig::ConfigError("cannot read config file " + *config_path);
      config = mosaig::RunConfig::parse(*text);
    } else if (mosaig::RunStore::exists(root, run)) {
      // Later stages inherit the run's recorded settings.
      auto store = mosaig::RunStore::open_existing(root, run);
      for (const auto& [k, v] : store.manifest().config) config.set(k, v);
    }
    auto apply = [&](const char* key, const auto& value) {
      if (value) config.set(key, *value);
    };
    if (stub) config.set("stub", "true");
    apply("preset", preset);
    apply("languages", languages);
    apply("mode", mode);
    apply("normalization", normalize);
    apply("compare", compare);
    apply("ages", ages);
    apply("genders", genders);
    apply("countries", countries);
    apply("landmarks", landmarks);
    if (rounds) config.set("rounds", std::to_string(*rounds));
    if (workers) config.set("workers", std::to_string(*workers));
    if (seed) config.set("seed", std::to_string(*seed));
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw mosaig::ConfigError("--set expects key=value, got '" + kv + "'");
      config.set(std::string(mosaig::trim(kv.substr(0, eq))), std::string(mosaig::trim(kv.substr(eq + 1))));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mosaig::exit_code_for(e);
  }

  mosaig::Pipeline pipeline(root, run, config);
  if (command == "serve-annotation") {
    try {
      // When serving, the summary is announced once the port is bound.
      auto summary = pipeline.serve_annotation(no_serve ? -1 : port, &std::cout);
      if (no_serve) std::cout << summary << std::endl;
      return mosaig::kExitOk;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mosaig::exit_code_for(e);
    }
  }
  return pipeline.run(command, std::cout, std::cerr);
}
