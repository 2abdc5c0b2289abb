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

#ifndef MOSAIG_TESTS_TEST_SUPPORT_HPP_
#define MOSAIG_TESTS_TEST_SUPPORT_HPP_

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "mosaig/backends.hpp"
#include "mosaig/image.hpp"
#include "mosaig/matrix.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/vocabulary.hpp"

namespace mosaig::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "mosaig-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) std::abort();
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// 12 specs: children of both genders from two countries at three landmarks.
inline MatrixFilter mini_filter() {
  MatrixFilter f;
  f.ages = {AgeGroup::Child};
  f.countries = {"Germany", "Vietnam"};
  f.landmarks = {"Golden Gate Bridge", "Taj Mahal", "White House"};
  return f;
}

inline std::vector<PromptSpec> mini_matrix(std::vector<std::string> languages = {"en"}) {
  return enumerate_matrix(Vocabulary::seeded(), languages, false, mini_filter());
}

// Small images keep PNG work cheap in unit tests.
inline GenParams small_params() {
  GenParams p;
  p.width = 32;
  p.height = 32;
  return p;
}

// Persists specs and one stub image per spec from its simple caption.
inline void populate_run(RunStore& store, const std::vector<PromptSpec>& specs,
                         CaptionMode mode = CaptionMode::Simple) {
  store.put_specs(specs);
  StubImageGenerator gen("test", {"en", "de", "hi", "es", "vi"});
  for (const auto& s : store.specs()) {
    const std::string caption = mode == CaptionMode::Simple ? s.simple_caption : s.agentic_caption.value();
    ImageRecord r;
    r.spec_id = s.id;
    r.caption = caption;
    r.mode = mode;
    r.generator = gen.fingerprint();
    r.params = small_params();
    store.put_image(r, encode_png(gen.generate(caption, r.params)));
  }
}

}  // namespace mosaig::testing

#endif  // MOSAIG_TESTS_TEST_SUPPORT_HPP_
