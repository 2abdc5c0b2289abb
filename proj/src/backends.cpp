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

#include "mosaig/backends.hpp"

#include <algorithm>
#include <cmath>

#include "mosaig/embedded_data.hpp"
#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

std::map<std::string, GeneratorPreset> parse_presets(std::string_view text) {
  std::map<std::string, GeneratorPreset> out;
  for (const auto& [key, value] : parse_key_values(text)) {
    auto dot = key.find('.');
    if (dot == std::string::npos) throw ConfigError("preset key '" + key + "' lacks a preset prefix");
    auto name = key.substr(0, dot);
    auto field = key.substr(dot + 1);
    auto& p = out[name];
    p.name = name;
    try {
      if (field == "guidance_scale") p.params.guidance_scale = std::stod(value);
      else if (field == "inference_steps") p.params.inference_steps = std::stoi(value);
      else if (field == "seed") p.params.seed = std::stoull(value);
      else if (field == "width") p.params.width = std::stoi(value);
      else if (field == "height") p.params.height = std::stoi(value);
      else if (field == "languages") p.languages = split(value, ',');
      else throw ConfigError("unknown preset field '" + field + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad value for preset key '" + key + "'");
    }
  }
  for (const auto& [name, p] : out) {
    if (p.params.inference_steps < 1) throw ConfigError("preset " + name + ": inference_steps must be >= 1");
    if (p.params.width < 1 || p.params.height < 1) throw ConfigError("preset " + name + ": bad dimensions");
    if (p.languages.empty()) throw ConfigError("preset " + name + ": no languages");
  }
  return out;
}

const GeneratorPreset& generator_preset(std::string_view name) {
  static const auto presets = parse_presets(embedded::presets);
  auto it = presets.find(std::string(name));
  if (it == presets.end()) throw ConfigError("unknown generator preset '" + std::string(name) + "'");
  return it->second;
}

bool ImageGenerator::supports(std::string_view language) const {
  auto langs = supported_languages();
  return std::find(langs.begin(), langs.end(), language) != langs.end();
}

// ---------------------------------------------------------------------------

StubChat::StubChat(const Script& script, std::string default_reply)
    : default_reply_(std::move(default_reply)), script_hash_(fnv1a64(default_reply_)) {
  for (const auto& [pattern, reply] : script) {
    try {
      rules_.emplace_back(std::regex(pattern, std::regex::ECMAScript | std::regex::icase), reply);
    } catch (const std::regex_error&) {
      throw ConfigError("invalid stub chat pattern '" + pattern + "'");
    }
    script_hash_ = fnv1a64(pattern + '\x1f' + reply, script_hash_);
  }
}

std::string StubChat::send(std::span<const ChatMessage> messages) {
  {
    std::lock_guard lock(mutex_);
    calls_.emplace_back(messages.begin(), messages.end());
  }
  if (messages.empty()) return default_reply_;
  const std::string& prompt = messages.back().text;
  for (const auto& [re, reply] : rules_) {
    std::smatch m;
    if (std::regex_search(prompt, m, re)) return m.format(reply);
  }
  return default_reply_;
}

std::string StubChat::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(script_hash_));
  return std::string("stub-chat/") + buf;
}

std::vector<std::vector<ChatMessage>> StubChat::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::unique_ptr<StubChat> stub_chat(const StubChat::Script& script, std::string default_reply) {
  return std::make_unique<StubChat>(script, std::move(default_reply));
}

StubChat::Script demo_chat_script() {
  return {
      {R"(Person attire: (.*)\nPerson appearance: (.*)\nLandmark: (.*))", "$2 wearing $1, standing in front of $3."},
      {R"(Your current description: (.*))", "$1"},
      {R"(Another agent asks: )", "Yes, that fits well."},
      // Relayed questions stay generic so no persona leaks its attribute.
      {R"(Ask the Country Agent)", "Is this attire suitable for my age and gender?"},
      {R"(Ask the Landmark Agent)", "How do visitors typically interact with this landmark?"},
      {R"(Ask the Age-Gender Agent)", "Are the accessories and mannerisms culturally appropriate?"},
      {R"(traditional attire of an? (\S+) person)", "traditional $1 attire with embroidered patterns"},
      {R"(describe the appearance of (an? [^,]+),)", "$1 with a warm smile"},
      {R"(architecture of the (.+) in (\S+) and its surroundings)", "the $1 in $2 under a clear blue sky"},
  };
}

Image StubImageGenerator::generate(std::string_view caption, const GenParams& params) {
  if (params.width < 1 || params.height < 1 || params.inference_steps < 1)
    throw ConfigError("invalid generation parameters");
  std::string key(caption);
  key += '\x1f' + format_double(params.guidance_scale) + '\x1f' + std::to_string(params.inference_steps) + '\x1f' +
         std::to_string(params.seed);
  SplitMix64 rng(fnv1a64(key, 0x5eed));
  double corner[4][3];
  for (auto& c : corner)
    for (double& ch : c) ch = rng.uniform() * 255.0;
  Image img;
  img.width = params.width;
  img.height = params.height;
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  const double wx = img.width > 1 ? img.width - 1 : 1;
  const double wy = img.height > 1 ? img.height - 1 : 1;
  for (int y = 0; y < img.height; ++y) {
    const double v = y / wy;
    for (int x = 0; x < img.width; ++x) {
      const double u = x / wx;
      for (int ch = 0; ch < 3; ++ch) {
        double top = corner[0][ch] * (1 - u) + corner[1][ch] * u;
        double bottom = corner[2][ch] * (1 - u) + corner[3][ch] * u;
        img.rgb[(static_cast<std::size_t>(y) * img.width + x) * 3 + ch] =
            static_cast<std::uint8_t>(std::lround(top * (1 - v) + bottom * v));
      }
    }
  }
  return img;
}

std::string StubTranslator::do_translate(std::string_view text, std::string_view, std::string_view target) {
  return "[" + std::string(target) + "] " + std::string(text);
}

Eigen::VectorXd StubScorer::unit_vector(std::uint64_t key) const {
  SplitMix64 rng(key);
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.gaussian();
  return v / v.norm();
}

Eigen::VectorXd StubScorer::embed_text(std::string_view text) { return unit_vector(fnv1a64(text, seed_ * 2 + 1)); }

Eigen::VectorXd StubScorer::embed_image(const Image& image) {
  return unit_vector(fnv1a64(std::span(image.rgb), seed_ * 2 + 2));
}

Eigen::VectorXd StubScorer::classify(const Image& image) {
  SplitMix64 rng(fnv1a64(std::span(image.rgb), seed_ * 2 + 3));
  Eigen::VectorXd logits(classes_);
  for (int i = 0; i < classes_; ++i) logits[i] = 3.0 * rng.gaussian();
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

double StubScorer::aesthetic(const Image& image) {
  SplitMix64 rng(fnv1a64(std::span(image.rgb), seed_ * 2 + 4));
  return 1.0 + 9.0 * rng.uniform();
}

std::string StubScorer::fingerprint() const {
  return "stub-scorer/seed=" + std::to_string(seed_) + ",dim=" + std::to_string(dim_) +
         ",classes=" + std::to_string(classes_);
}

std::unique_ptr<StubScorer> stub_scorer(std::uint64_t seed) { return std::make_unique<StubScorer>(seed); }

}  // namespace mosaig
