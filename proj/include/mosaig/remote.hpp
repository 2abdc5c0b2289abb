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

#ifndef MOSAIG_REMOTE_HPP_
#define MOSAIG_REMOTE_HPP_

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mosaig/backends.hpp"

namespace mosaig {

struct EndpointConfig {
  std::string url;    // e.g. "http://127.0.0.1:8000" or with a path prefix
  std::string token;  // sent as "Authorization: Bearer <token>" when set
  int max_retries = 3;
  std::chrono::milliseconds backoff{200};  // doubled after every retry
  std::chrono::milliseconds timeout{120000};
  int max_concurrency = 4;

  // Reads MOSAIG_<ROLE>_URL and MOSAIG_<ROLE>_TOKEN; throws ConfigError
  // when the URL variable is unset.
  static EndpointConfig from_env(std::string_view role);
};

// JSON-over-HTTP POST with bounded retries. Transient failures (connection
// errors, 408, 429, 5xx) are retried with exponential backoff; any other
// non-2xx status raises BackendError immediately.
class JsonEndpoint {
 public:
  explicit JsonEndpoint(EndpointConfig config);
  ~JsonEndpoint();
  JsonEndpoint(const JsonEndpoint&) = delete;
  JsonEndpoint& operator=(const JsonEndpoint&) = delete;

  // Request and response bodies are serialized JSON text.
  std::string post(std::string_view path, const std::string& body);

  const EndpointConfig& config() const { return config_; }
  std::size_t retry_count() const { return retries_.load(); }

 private:
  struct Impl;
  EndpointConfig config_;
  std::unique_ptr<Impl> impl_;
  std::atomic<std::size_t> retries_{0};
};

class RemoteChat final : public ChatModel {
 public:
  explicit RemoteChat(EndpointConfig config, std::string model_label = "remote");
  std::string send(std::span<const ChatMessage> messages) override;
  std::string fingerprint() const override;
  const JsonEndpoint& endpoint() const { return endpoint_; }

 private:
  JsonEndpoint endpoint_;
  std::string label_;
};

class RemoteImageGenerator final : public ImageGenerator {
 public:
  RemoteImageGenerator(EndpointConfig config, std::vector<std::string> languages, std::string model_label = "remote");
  Image generate(std::string_view caption, const GenParams& params) override;
  std::vector<std::string> supported_languages() const override { return languages_; }
  std::string fingerprint() const override;
  const JsonEndpoint& endpoint() const { return endpoint_; }

 private:
  JsonEndpoint endpoint_;
  std::vector<std::string> languages_;
  std::string label_;
};

class RemoteTranslator final : public Translator {
 public:
  explicit RemoteTranslator(EndpointConfig config);
  std::string fingerprint() const override;
  const JsonEndpoint& endpoint() const { return endpoint_; }

 protected:
  std::string do_translate(std::string_view text, std::string_view source, std::string_view target) override;

 private:
  JsonEndpoint endpoint_;
};

class RemoteScorer final : public ScoreBackend {
 public:
  explicit RemoteScorer(EndpointConfig config, std::string model_label = "remote");
  Eigen::VectorXd embed_text(std::string_view text) override;
  Eigen::VectorXd embed_image(const Image& image) override;
  Eigen::VectorXd classify(const Image& image) override;
  double aesthetic(const Image& image) override;
  std::string fingerprint() const override;
  const JsonEndpoint& endpoint() const { return endpoint_; }

 private:
  JsonEndpoint endpoint_;
  std::string label_;
};

std::unique_ptr<ChatModel> remote_chat(EndpointConfig config);
std::unique_ptr<ImageGenerator> remote_image(EndpointConfig config, std::vector<std::string> languages);
std::unique_ptr<Translator> remote_translate(EndpointConfig config);
std::unique_ptr<ScoreBackend> remote_scorer(EndpointConfig config);

}  // namespace mosaig

#endif  // MOSAIG_REMOTE_HPP_
