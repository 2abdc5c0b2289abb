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

#include "mosaig/remote.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <semaphore>
#include <thread>

#include "mosaig/errors.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

using nlohmann::json;

EndpointConfig EndpointConfig::from_env(std::string_view role) {
  std::string upper;
  for (char c : role) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  EndpointConfig cfg;
  const char* url = std::getenv(("MOSAIG_" + upper + "_URL").c_str());
  if (!url || !*url) throw ConfigError("MOSAIG_" + upper + "_URL is not set");
  cfg.url = url;
  if (const char* token = std::getenv(("MOSAIG_" + upper + "_TOKEN").c_str())) cfg.token = token;
  return cfg;
}

struct JsonEndpoint::Impl {
  std::string host;    // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
  std::counting_semaphore<> slots;

  explicit Impl(const EndpointConfig& cfg) : slots(std::max(1, cfg.max_concurrency)) {
    auto scheme = cfg.url.find("://");
    auto path_start = cfg.url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    host = cfg.url.substr(0, path_start);
    if (path_start != std::string::npos) prefix = cfg.url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  }
};

JsonEndpoint::JsonEndpoint(EndpointConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw ConfigError("endpoint URL is empty");
  impl_ = std::make_unique<Impl>(config_);
}

JsonEndpoint::~JsonEndpoint() = default;

std::string JsonEndpoint::post(std::string_view path, const std::string& body) {
  const std::string target = impl_->prefix + std::string(path);
  const std::string where = config_.url + std::string(path);
  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  auto delay = config_.backoff;
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    httplib::Client client(impl_->host);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    client.set_connection_timeout(std::max<long>(1, static_cast<long>(secs)), 0);
    client.set_read_timeout(std::max<long>(1, static_cast<long>(secs)), 0);
    httplib::Headers headers;
    if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
    auto res = client.Post(target, headers, body, "application/json");

    bool transient = false;
    if (!res) {
      transient = true;
      last_error = "transport failure: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      return res->body;
    } else {
      transient = res->status == 408 || res->status == 429 || res->status >= 500;
      last_error = "HTTP " + std::to_string(res->status);
      if (!transient) throw BackendError(where, last_error, false);
    }
    if (attempt >= config_.max_retries)
      throw BackendError(where, last_error + " after " + std::to_string(attempt) + " retries", true);
    ++retries_;
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

namespace {

json parse_reply(const std::string& body, const std::string& where) {
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw ProtocolError(where + ": reply is not a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ProtocolError(where + ": malformed JSON reply: " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* name, const std::string& where) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(where + ": reply field '" + name + "' missing or mistyped");
  }
}

Eigen::VectorXd vector_field(const json& j, const char* name, const std::string& where) {
  auto values = field<std::vector<double>>(j, name, where);
  if (values.empty()) throw ProtocolError(where + ": empty '" + name + "'");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (!v.allFinite()) throw ProtocolError(where + ": non-finite values in '" + name + "'");
  return v;
}

Eigen::VectorXd normalized_embedding(const json& j, const std::string& where) {
  Eigen::VectorXd v = vector_field(j, "embedding", where);
  double n = v.norm();
  if (n <= 0) throw ProtocolError(where + ": zero embedding");
  return v / n;
}

json image_body(const Image& image) {
  auto png = encode_png(image);
  return json{{"png_base64", base64_encode(png)}};
}

}  // namespace

RemoteChat::RemoteChat(EndpointConfig config, std::string model_label)
    : endpoint_(std::move(config)), label_(std::move(model_label)) {}

std::string RemoteChat::send(std::span<const ChatMessage> messages) {
  json body;
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"text", m.text}});
  auto where = endpoint_.config().url + "/v1/chat";
  return field<std::string>(parse_reply(endpoint_.post("/v1/chat", body.dump()), where), "text", where);
}

std::string RemoteChat::fingerprint() const { return "remote-chat/" + label_ + "@" + endpoint_.config().url; }

RemoteImageGenerator::RemoteImageGenerator(EndpointConfig config, std::vector<std::string> languages,
                                           std::string model_label)
    : endpoint_(std::move(config)), languages_(std::move(languages)), label_(std::move(model_label)) {}

Image RemoteImageGenerator::generate(std::string_view caption, const GenParams& params) {
  json body{{"caption", caption},
            {"guidance_scale", params.guidance_scale},
            {"steps", params.inference_steps},
            {"seed", params.seed},
            {"width", params.width},
            {"height", params.height}};
  auto where = endpoint_.config().url + "/v1/generate";
  auto reply = parse_reply(endpoint_.post("/v1/generate", body.dump()), where);
  auto png = base64_decode(field<std::string>(reply, "png_base64", where));
  Image img = decode_png(png);
  if (img.width != params.width || img.height != params.height)
    throw ProtocolError(where + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                        ", requested " + std::to_string(params.width) + "x" + std::to_string(params.height));
  return img;
}

std::string RemoteImageGenerator::fingerprint() const {
  return "remote-image/" + label_ + "@" + endpoint_.config().url;
}

RemoteTranslator::RemoteTranslator(EndpointConfig config) : endpoint_(std::move(config)) {}

std::string RemoteTranslator::do_translate(std::string_view text, std::string_view source, std::string_view target) {
  json body{{"text", text}, {"source", source}, {"target", target}};
  auto where = endpoint_.config().url + "/v1/translate";
  return field<std::string>(parse_reply(endpoint_.post("/v1/translate", body.dump()), where), "text", where);
}

std::string RemoteTranslator::fingerprint() const { return "remote-translate@" + endpoint_.config().url; }

RemoteScorer::RemoteScorer(EndpointConfig config, std::string model_label)
    : endpoint_(std::move(config)), label_(std::move(model_label)) {}

Eigen::VectorXd RemoteScorer::embed_text(std::string_view text) {
  auto where = endpoint_.config().url + "/v1/embed_text";
  return normalized_embedding(parse_reply(endpoint_.post("/v1/embed_text", json{{"text", text}}.dump()), where),
                              where);
}

Eigen::VectorXd RemoteScorer::embed_image(const Image& image) {
  auto where = endpoint_.config().url + "/v1/embed_image";
  return normalized_embedding(parse_reply(endpoint_.post("/v1/embed_image", image_body(image).dump()), where),
                              where);
}

Eigen::VectorXd RemoteScorer::classify(const Image& image) {
  auto where = endpoint_.config().url + "/v1/classify";
  return vector_field(parse_reply(endpoint_.post("/v1/classify", image_body(image).dump()), where), "probabilities",
                      where);
}

double RemoteScorer::aesthetic(const Image& image) {
  auto where = endpoint_.config().url + "/v1/aesthetic";
  return field<double>(parse_reply(endpoint_.post("/v1/aesthetic", image_body(image).dump()), where), "score", where);
}

std::string RemoteScorer::fingerprint() const { return "remote-scorer/" + label_ + "@" + endpoint_.config().url; }

std::unique_ptr<ChatModel> remote_chat(EndpointConfig config) { return std::make_unique<RemoteChat>(std::move(config)); }

std::unique_ptr<ImageGenerator> remote_image(EndpointConfig config, std::vector<std::string> languages) {
  return std::make_unique<RemoteImageGenerator>(std::move(config), std::move(languages));
}

std::unique_ptr<Translator> remote_translate(EndpointConfig config) {
  return std::make_unique<RemoteTranslator>(std::move(config));
}

std::unique_ptr<ScoreBackend> remote_scorer(EndpointConfig config) {
  return std::make_unique<RemoteScorer>(std::move(config));
}

}  // namespace mosaig
