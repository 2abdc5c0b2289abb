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

#include "mosaig/annotation.hpp"

#include <algorithm>
#include <httplib.h>
#include <json.hpp>
#include <set>
#include <unordered_map>

#include "mosaig/matrix.hpp"
#include "mosaig/runstore.hpp"
#include "mosaig/util.hpp"

namespace mosaig {

using ojson = nlohmann::ordered_json;

const QuestionSet& question_set() {
  static const QuestionSet qs{
      "likert-3x5-v1",
      {{{"alignment",
         "How well does the image match the description?",
         {"Does not match at all", "Has significant discrepancies", "Has several minor discrepancies",
          "Has a few minor discrepancies", "Matches exactly"}},
        {"quality",
         "Determine if the following image is AI-generated or real.",
         {"AI-generated photo.", "Probably an AI-generated photo, but photorealistic.", "Neutral.",
          "Probably a real photo, but with irregular textures and shapes.", "Real photo."}},
        {"aesthetics",
         "How aesthetically pleasing is the image?",
         {"I find the image ugly.", "The image has a lot of flaws, but it's not completely unappealing.",
          "I find the image neither ugly nor aesthetically pleasing.",
          "The image is aesthetically pleasing and is nice to look at.",
          "The image is aesthetically stunning. I can look at it all day."}}}}};
  return qs;
}

namespace {

ojson question_set_object() {
  const auto& qs = question_set();
  ojson j;
  j["version"] = qs.version;
  ojson arr = ojson::array();
  for (const auto& q : qs.questions) {
    ojson o;
    o["key"] = q.key;
    o["prompt"] = q.prompt;
    ojson opts = ojson::array();
    for (std::size_t i = 0; i < q.options.size(); ++i) opts.push_back({{"value", i + 1}, {"label", q.options[i]}});
    o["options"] = std::move(opts);
    arr.push_back(std::move(o));
  }
  j["questions"] = std::move(arr);
  return j;
}

struct Candidate {
  const RunStore* store;
  std::string model;
  PromptSpec spec;
  ImageRecord image;
};

std::string candidate_value(const Candidate& c, Axis axis) {
  return axis_value(axis, &c.spec, c.image.mode, c.model);
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.next() % i]);
}

}  // namespace

std::string question_set_json() { return question_set_object().dump(2) + "\n"; }

ShortfallError::ShortfallError(std::vector<Shortfall> shortfalls)
    : ValidationError([&] {
        std::string s = "insufficient images in " + std::to_string(shortfalls.size()) + " stratum(s):";
        for (const auto& f : shortfalls)
          s += " [" + f.stratum + ": need " + std::to_string(f.needed) + ", have " + std::to_string(f.available) + "]";
        return s;
      }()),
      shortfalls_(std::move(shortfalls)) {}

std::vector<AnnotationTask> create_tasks(std::span<const AnnotationSource> sources, const TaskSampleOptions& options) {
  if (sources.empty()) throw ValidationError("no runs to sample annotation tasks from");
  std::vector<Axis> axes = options.axes;
  std::sort(axes.begin(), axes.end());
  axes.erase(std::unique(axes.begin(), axes.end()), axes.end());

  std::vector<Candidate> candidates;
  std::vector<std::string> models;
  for (const auto& src : sources) {
    if (!src.store) throw ValidationError("annotation source without a store");
    if (std::find(models.begin(), models.end(), src.model) == models.end()) models.push_back(src.model);
    std::unordered_map<std::string, PromptSpec> specs;
    for (auto& s : src.store->specs()) specs.emplace(s.id, std::move(s));
    for (auto& img : src.store->images()) {
      auto it = specs.find(img.spec_id);
      if (it == specs.end()) continue;
      candidates.push_back({src.store, src.model, it->second, std::move(img)});
    }
  }

  // Joint strata: the cross product of every axis domain.
  std::vector<std::vector<std::string>> domains;
  for (auto a : axes) domains.push_back(a == Axis::Model ? models : axis_values(a, ScoreTable{}));
  std::vector<std::vector<std::string>> strata{{}};
  for (const auto& dom : domains) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : strata)
      for (const auto& v : dom) {
        auto s = prefix;
        s.push_back(v);
        next.push_back(std::move(s));
      }
    strata = std::move(next);
  }
  const std::size_t per = options.sample_size / strata.size();
  if (per == 0)
    throw ValidationError("sample size " + std::to_string(options.sample_size) + " is smaller than the " +
                          std::to_string(strata.size()) + " strata");

  std::map<std::vector<std::string>, std::vector<const Candidate*>> buckets;
  for (const auto& c : candidates) {
    std::vector<std::string> key;
    for (auto a : axes) key.push_back(candidate_value(c, a));
    buckets[key].push_back(&c);
  }

  auto label = [&](const std::vector<std::string>& key) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < axes.size(); ++i) parts.push_back(std::string(to_string(axes[i])) + "=" + key[i]);
    return parts.empty() ? std::string("all") : join(parts, ",");
  };

  std::vector<Shortfall> shortfalls;
  std::vector<AnnotationTask> tasks;
  for (const auto& key : strata) {
    auto pool = buckets[key];
    if (pool.size() < per) {
      shortfalls.push_back({label(key), per, pool.size()});
      continue;
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate* x, const Candidate* y) {
      return std::tie(x->model, x->spec.id) < std::tie(y->model, y->spec.id);
    });
    seeded_shuffle(pool, options.seed ^ fnv1a64(label(key)));
    for (std::size_t i = 0; i < per; ++i) {
      const auto& c = *pool[i];
      AnnotationTask t;
      t.run_id = c.store->manifest().run_id;
      t.spec_id = c.spec.id;
      t.mode = c.image.mode;
      t.model = c.model;
      t.image_hash = c.image.content_hash;
      t.caption = c.image.caption;
      t.question_set_version = question_set().version;
      t.task_id = sha256_hex("mosaig-task-v1\x1f" + t.run_id + "\x1f" + t.spec_id + "\x1f" +
                             std::string(to_string(t.mode)) + "\x1f" + t.model)
                      .substr(0, 16);
      tasks.push_back(std::move(t));
    }
  }
  if (!shortfalls.empty()) throw ShortfallError(std::move(shortfalls));
  return tasks;
}

bool valid_annotator_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

AnnotationService::AnnotationService(RunStore& store, std::vector<const RunStore*> image_stores, std::uint64_t seed,
                                     std::vector<std::string> annotators)
    : store_(store), image_stores_(std::move(image_stores)), seed_(seed), annotators_(std::move(annotators)) {
  tasks_ = store_.tasks();
  if (tasks_.empty()) throw NotFoundError("run " + store_.manifest().run_id + " has no annotation tasks");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].question_set_version != question_set().version)
      throw ConfigError("task " + tasks_[i].task_id + " uses question set " + tasks_[i].question_set_version);
    task_index_[tasks_[i].task_id] = i;
  }
}

void AnnotationService::check_annotator(const std::string& id) const {
  if (!valid_annotator_id(id)) throw ValidationError("invalid annotator id '" + id + "'");
  if (!annotators_.empty() && std::find(annotators_.begin(), annotators_.end(), id) == annotators_.end())
    throw ValidationError("annotator '" + id + "' is not registered");
}

std::vector<std::size_t> AnnotationService::order_for(const std::string& annotator) const {
  std::vector<std::size_t> order(tasks_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, seed_ ^ fnv1a64(annotator));
  return order;
}

std::optional<AnnotationTask> AnnotationService::next_task(const std::string& annotator) {
  check_annotator(annotator);
  std::set<std::string> done;
  for (const auto& r : store_.annotations())
    if (r.annotator_id == annotator) done.insert(r.task_id);
  for (auto i : order_for(annotator))
    if (!done.count(tasks_[i].task_id)) return tasks_[i];
  return std::nullopt;
}

AnnotationService::SubmitStatus AnnotationService::submit(AnnotationRecord record) {
  check_annotator(record.annotator_id);
  for (int v : {record.alignment, record.quality, record.aesthetics})
    if (v < 1 || v > 5) throw ValidationError("rating " + std::to_string(v) + " outside 1..5");
  if (!task_index_.count(record.task_id)) throw NotFoundError("unknown task '" + record.task_id + "'");
  if (record.submitted_at.empty()) record.submitted_at = utc_timestamp();
  return store_.put_annotation(record) ? SubmitStatus::Stored : SubmitStatus::Duplicate;
}

std::map<std::string, std::size_t> AnnotationService::progress() const {
  std::map<std::string, std::size_t> out;
  for (const auto& a : annotators_) out[a] = 0;
  for (const auto& r : store_.annotations()) out[r.annotator_id]++;
  return out;
}

std::optional<std::vector<std::uint8_t>> AnnotationService::image(const std::string& content_hash) const {
  std::vector<const RunStore*> stores{&store_};
  stores.insert(stores.end(), image_stores_.begin(), image_stores_.end());
  for (const auto* s : stores)
    if (auto rec = s->find_image_by_hash(content_hash)) return s->read_image_bytes(*rec);
  return std::nullopt;
}

PairedRatings paired_ratings(std::span<const AnnotationRecord> records, const std::string& a, const std::string& b) {
  std::map<std::string, const AnnotationRecord*> ra;
  std::map<std::string, const AnnotationRecord*> rb;
  for (const auto& r : records) {
    if (r.annotator_id == a) ra[r.task_id] = &r;
    if (r.annotator_id == b) rb[r.task_id] = &r;
  }
  PairedRatings out;
  for (const auto& [task, x] : ra) {
    auto it = rb.find(task);
    if (it == rb.end()) continue;
    const auto* y = it->second;
    out.task_ids.push_back(task);
    out.a[0].push_back(x->alignment);
    out.a[1].push_back(x->quality);
    out.a[2].push_back(x->aesthetics);
    out.b[0].push_back(y->alignment);
    out.b[1].push_back(y->quality);
    out.b[2].push_back(y->aesthetics);
  }
  return out;
}

std::vector<PairAgreement> pairwise_agreement(std::span<const AnnotationRecord> records,
                                              metrics::KappaWeighting weighting) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.annotator_id);
  std::vector<std::string> annotators(ids.begin(), ids.end());
  std::vector<PairAgreement> out;
  for (std::size_t i = 0; i < annotators.size(); ++i)
    for (std::size_t j = i + 1; j < annotators.size(); ++j) {
      PairAgreement p{annotators[i], annotators[j], 0, {}};
      auto paired = paired_ratings(records, p.annotator_a, p.annotator_b);
      p.paired = paired.task_ids.size();
      if (p.paired > 0)
        for (std::size_t q = 0; q < 3; ++q) {
          try {
            p.kappa[q] = metrics::weighted_kappa(paired.a[q], paired.b[q], weighting);
          } catch (const UndefinedStatisticError&) {
          }
        }
      out.push_back(std::move(p));
    }
  return out;
}

// ---- REST ------------------------------------------------------------------

struct AnnotationServer::Impl {
  AnnotationService& service;
  std::string token;
  httplib::Server server;

  Impl(AnnotationService& s, std::string t) : service(s), token(std::move(t)) {}

  void reply(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }
  void fail(httplib::Response& res, int status, const std::string& what) {
    reply(res, status, {{"status", "error"}, {"error", what}});
  }
};

AnnotationServer::AnnotationServer(AnnotationService& service, std::string token)
    : impl_(std::make_unique<Impl>(service, std::move(token))) {
  auto* im = impl_.get();
  auto& srv = im->server;

  srv.set_pre_routing_handler([im](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    if (req.method == "OPTIONS") {
      res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (!im->token.empty() && req.get_header_value("Authorization") != "Bearer " + im->token) {
      im->fail(res, 401, "missing or wrong bearer token");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.Get("/api/questions", [im](const httplib::Request&, httplib::Response& res) {
    im->reply(res, 200, question_set_object());
  });

  srv.Get("/api/tasks/next", [im](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("annotator")) return im->fail(res, 400, "annotator query parameter required");
    try {
      auto task = im->service.next_task(req.get_param_value("annotator"));
      if (!task) return im->reply(res, 200, {{"status", "done"}});
      ojson t = ojson::parse(task_to_json(*task));
      t["image_url"] = "/api/images/" + task->image_hash;
      t["questions"] = question_set_object()["questions"];
      im->reply(res, 200, {{"status", "task"}, {"task", std::move(t)}});
    } catch (const ValidationError& e) {
      im->fail(res, 400, e.what());
    }
  });

  srv.Post("/api/annotations", [im](const httplib::Request& req, httplib::Response& res) {
    AnnotationRecord r;
    try {
      auto j = ojson::parse(req.body);
      r.task_id = j.at("task_id").get<std::string>();
      r.annotator_id = j.at("annotator_id").get<std::string>();
      r.alignment = j.at("alignment").get<int>();
      r.quality = j.at("quality").get<int>();
      r.aesthetics = j.at("aesthetics").get<int>();
    } catch (const ojson::exception& e) {
      return im->fail(res, 400, std::string("malformed annotation: ") + e.what());
    }
    try {
      auto status = im->service.submit(r);
      if (status == AnnotationService::SubmitStatus::Stored)
        im->reply(res, 201, {{"status", "stored"}});
      else
        im->reply(res, 200, {{"status", "duplicate"}});
    } catch (const ValidationError& e) {
      im->fail(res, 400, e.what());
    } catch (const NotFoundError& e) {
      im->fail(res, 404, e.what());
    } catch (const ConflictError& e) {
      im->fail(res, 409, e.what());
    }
  });

  srv.Get(R"(/api/images/([0-9a-f]{64}))", [im](const httplib::Request& req, httplib::Response& res) {
    try {
      auto bytes = im->service.image(req.matches[1]);
      if (!bytes) return im->fail(res, 404, "no image with that hash");
      res.set_content(std::string(bytes->begin(), bytes->end()), "image/png");
    } catch (const CorruptionError& e) {
      im->fail(res, 500, e.what());
    }
  });

  srv.Get("/api/progress", [im](const httplib::Request&, httplib::Response& res) {
    ojson counts = ojson::object();
    for (const auto& [id, n] : im->service.progress()) counts[id] = n;
    im->reply(res, 200, {{"tasks", im->service.task_count()}, {"annotators", std::move(counts)}});
  });
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw ConfigError("cannot bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void AnnotationServer::serve() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace mosaig
