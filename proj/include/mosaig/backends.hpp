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

#ifndef MOSAIG_BACKENDS_HPP_
#define MOSAIG_BACKENDS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mosaig/image.hpp"

namespace mosaig {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string text;

  bool operator==(const ChatMessage&) const = default;
};

// A stateless chat-completion model: every call carries its full history.
class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual std::string send(std::span<const ChatMessage> messages) = 0;
  // Model id plus decoding parameters; stable per configuration.
  virtual std::string fingerprint() const = 0;
};

struct GenParams {
  double guidance_scale = 4.0;
  int inference_steps = 30;
  std::uint64_t seed = 11;
  int width = 768;
  int height = 768;

  bool operator==(const GenParams&) const = default;
};

struct GeneratorPreset {
  std::string name;
  GenParams params;
  std::vector<std::string> languages;
};

// Parses "<preset>.<key> = <value>" lines. Throws ConfigError.
std::map<std::string, GeneratorPreset> parse_presets(std::string_view text);
// Shipped presets ("flux", "alt").
const GeneratorPreset& generator_preset(std::string_view name);

class ImageGenerator {
 public:
  virtual ~ImageGenerator() = default;
  virtual Image generate(std::string_view caption, const GenParams& params) = 0;
  virtual std::vector<std::string> supported_languages() const = 0;
  virtual std::string fingerprint() const = 0;

  bool supports(std::string_view language) const;
};

class Translator {
 public:
  virtual ~Translator() = default;
  // Identity when source == target, for every implementation.
  std::string translate(std::string_view text, std::string_view source, std::string_view target) {
    if (source == target) return std::string(text);
    return do_translate(text, source, target);
  }
  virtual std::string fingerprint() const = 0;

 protected:
  virtual std::string do_translate(std::string_view text, std::string_view source, std::string_view target) = 0;
};

class ScoreBackend {
 public:
  virtual ~ScoreBackend() = default;
  // Unit-norm embeddings in a shared text/image space.
  virtual Eigen::VectorXd embed_text(std::string_view text) = 0;
  virtual Eigen::VectorXd embed_image(const Image& image) = 0;
  // Class distribution, sums to one.
  virtual Eigen::VectorXd classify(const Image& image) = 0;
  // Aesthetic rating on [1, 10].
  virtual double aesthetic(const Image& image) = 0;
  virtual std::string fingerprint() const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic stubs.

// Replies by matching regex patterns (case-insensitive, ECMAScript) against
// the last message in order; the first match wins and its reply is expanded
// as a regex format string, so "$1" refers to the first capture group.
class StubChat final : public ChatModel {
 public:
  using Script = std::vector<std::pair<std::string, std::string>>;

  explicit StubChat(const Script& script = {}, std::string default_reply = "OK.");

  std::string send(std::span<const ChatMessage> messages) override;
  std::string fingerprint() const override;

  // Every request this stub received, in call order.
  std::vector<std::vector<ChatMessage>> calls() const;

 private:
  std::vector<std::pair<std::regex, std::string>> rules_;
  std::string default_reply_;
  std::uint64_t script_hash_;
  mutable std::mutex mutex_;
  std::vector<std::vector<ChatMessage>> calls_;
};

std::unique_ptr<StubChat> stub_chat(const StubChat::Script& script, std::string default_reply = "OK.");

// Echoing persona script used by `--stub` runs: each reply restates the
// concrete values of its prompt so the summary names person, attire and
// landmark.
StubChat::Script demo_chat_script();

// Renders a smooth seeded gradient; output is a pure function of
// (caption bytes, params).
class StubImageGenerator final : public ImageGenerator {
 public:
  StubImageGenerator(std::string name, std::vector<std::string> languages)
      : name_(std::move(name)), languages_(std::move(languages)) {}
  Image generate(std::string_view caption, const GenParams& params) override;
  std::vector<std::string> supported_languages() const override { return languages_; }
  std::string fingerprint() const override { return "stub-image/" + name_; }

 private:
  std::string name_;
  std::vector<std::string> languages_;
};

// Tags text with the target language: "[de] text".
class StubTranslator final : public Translator {
 public:
  std::string fingerprint() const override { return "stub-translate/v1"; }

 protected:
  std::string do_translate(std::string_view text, std::string_view source, std::string_view target) override;
};

// Embeddings and class distributions derived from seeded hashes of the
// input bytes.
class StubScorer final : public ScoreBackend {
 public:
  explicit StubScorer(std::uint64_t seed = 0, int dim = 64, int classes = 100)
      : seed_(seed), dim_(dim), classes_(classes) {}

  Eigen::VectorXd embed_text(std::string_view text) override;
  Eigen::VectorXd embed_image(const Image& image) override;
  Eigen::VectorXd classify(const Image& image) override;
  double aesthetic(const Image& image) override;
  std::string fingerprint() const override;

 private:
  Eigen::VectorXd unit_vector(std::uint64_t key) const;

  std::uint64_t seed_;
  int dim_;
  int classes_;
};

std::unique_ptr<StubScorer> stub_scorer(std::uint64_t seed);

}  // namespace mosaig

#endif  // MOSAIG_BACKENDS_HPP_
