#include "persona/service.h"

#include <fstream>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "persona/error.h"

namespace persona {

using nlohmann::json;

AnnotationService::AnnotationService(std::vector<msf::SubScene> corpus,
                                     std::vector<Annotator> annotators,
                                     AnnotationStore store)
    : corpus_(std::move(corpus)) {
  std::set<std::string> known;
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    std::string id = corpus_[i].Id();
    if (!index_.emplace(id, i).second) throw SchemaError("duplicate sub-scene id " + id);
    known.insert(id);
    ids_.push_back(std::move(id));
  }
  for (Annotator& a : annotators) {
    if (a.id.empty()) throw ConfigError("empty annotator id");
    const std::string id = a.id;
    annotators_[id] = std::move(a);
  }
  store_ = AnnotationStore(std::move(known));
  for (const AnnotationRecord& r : store.Records()) store_.Record(r);
}

const msf::SubScene* AnnotationService::Find(const std::string& subscene_id) const {
  auto it = index_.find(subscene_id);
  return it == index_.end() ? nullptr : &corpus_[it->second];
}

const Annotator* AnnotationService::FindAnnotator(const std::string& annotator_id) const {
  auto it = annotators_.find(annotator_id);
  return it == annotators_.end() ? nullptr : &it->second;
}

std::optional<AnnotationTask> AnnotationService::NextTask(
    const std::string& annotator_id) const {
  if (!FindAnnotator(annotator_id)) {
    throw UnknownAnnotatorError("unknown annotator \"" + annotator_id + "\"");
  }
  std::shared_lock lock(mu_);
  std::optional<std::size_t> best;
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (store_.Has(ids_[i], annotator_id)) continue;
    const std::size_t c = store_.CountFor(ids_[i]);
    if (!best || c < best_count) {
      best = i;
      best_count = c;
      if (c == 0) break;
    }
  }
  if (!best) return std::nullopt;
  AnnotationTask task;
  task.subscene_id = ids_[*best];
  task.subscene = corpus_[*best];
  task.remaining_traits.assign(kAllTraits.begin(), kAllTraits.end());
  return task;
}

SubmitAck AnnotationService::Submit(const std::string& annotator_id,
                                    const std::string& subscene_id,
                                    const PerTrait<int>& scores) {
  if (!FindAnnotator(annotator_id)) {
    throw UnknownAnnotatorError("unknown annotator \"" + annotator_id + "\"");
  }
  AnnotationRecord r;
  r.subscene_id = subscene_id;
  r.annotator_id = annotator_id;
  r.scores = scores;
  r.timestamp = Now();
  std::unique_lock lock(mu_);
  const auto result = store_.Record(r);
  return {subscene_id, result.subscene_count, result.replaced};
}

Progress AnnotationService::GetProgress() const {
  std::shared_lock lock(mu_);
  Progress p;
  p.total = ids_.size();
  for (const std::string& id : ids_) {
    ++p.buckets[std::min<std::size_t>(store_.CountFor(id), 3)];
  }
  for (const auto& [id, a] : annotators_) p.per_annotator[id] = 0;
  for (const AnnotationRecord& r : store_.Records()) ++p.per_annotator[r.annotator_id];
  return p;
}

void AnnotationService::SetLogSink(std::function<void(const AnnotationRecord&)> sink) {
  std::unique_lock lock(mu_);
  store_.SetLogSink(std::move(sink));
}

std::vector<AnnotationRecord> AnnotationService::Records() const {
  std::shared_lock lock(mu_);
  return store_.Records();
}

std::function<void(const AnnotationRecord&)> AppendToFile(const std::filesystem::path& path) {
  auto out = std::make_shared<std::ofstream>(path, std::ios::app | std::ios::binary);
  if (!*out) throw ConfigError("cannot open store " + path.string() + " for append");
  return [out, path](const AnnotationRecord& r) {
    *out << ToJsonLine(r) << '\n';
    out->flush();
    if (!*out) throw ConfigError("write to " + path.string() + " failed");
  };
}

namespace {

json SubSceneJson(const msf::SubScene& s) {
  json utts = json::array();
  for (const Utterance& u : s.utterances) {
    utts.push_back({{"index", u.index},
                    {"speaker", u.speaker},
                    {"text", u.text},
                    {"is_main", u.speaker == s.main_speaker}});
  }
  return {{"subscene_id", s.Id()},
          {"episode_id", s.episode_id},
          {"scene_id", s.scene_id},
          {"main_speaker", s.main_speaker},
          {"start", s.start},
          {"end", s.end},
          {"utterances", std::move(utts)}};
}

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& message) {
  Reply(res, status, {{"error", message}});
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationService& service;
  httplib::Server server;

  explicit Impl(AnnotationService& s) : service(s) {}

  // Returns false (and fills res) when the caller may not act as `annotator`.
  bool Authorize(const httplib::Request& req, httplib::Response& res,
                 const std::string& annotator) {
    if (annotator.empty()) {
      ReplyError(res, 400, "missing annotator");
      return false;
    }
    const Annotator* a = service.FindAnnotator(annotator);
    if (!a) {
      ReplyError(res, 404, "unknown annotator \"" + annotator + "\"");
      return false;
    }
    if (!a->token.empty()) {
      const std::string header = req.get_header_value("Authorization");
      if (header != "Bearer " + a->token) {
        ReplyError(res, 401, "missing or invalid bearer token");
        return false;
      }
    }
    return true;
  }

  void Routes() {
    server.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string annotator = req.get_param_value("annotator");
      if (!Authorize(req, res, annotator)) return;
      auto task = service.NextTask(annotator);
      if (!task) {
        Reply(res, 200, {{"done", true}, {"task", nullptr}});
        return;
      }
      json traits = json::array();
      for (Trait t : task->remaining_traits) traits.push_back(TraitName(t));
      json body = SubSceneJson(task->subscene);
      body["remaining_traits"] = std::move(traits);
      Reply(res, 200, {{"done", false}, {"task", std::move(body)}});
    });

    server.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error&) {
        ReplyError(res, 400, "body is not valid JSON");
        return;
      }
      if (!body.is_object() || !body.contains("annotator") || !body["annotator"].is_string() ||
          !body.contains("subscene_id") || !body["subscene_id"].is_string() ||
          !body.contains("scores") || !body["scores"].is_object()) {
        ReplyError(res, 400, "expected {annotator, subscene_id, scores}");
        return;
      }
      const std::string annotator = body["annotator"];
      if (!Authorize(req, res, annotator)) return;
      PerTrait<int> scores{};
      for (Trait t : kAllTraits) {
        const std::string key(TraitName(t));
        const json& s = body["scores"];
        if (!s.contains(key) || !s[key].is_number_integer()) {
          ReplyError(res, 400, "missing integer score for " + key);
          return;
        }
        scores[Index(t)] = s[key].get<int>();
      }
      try {
        const SubmitAck ack = service.Submit(annotator, body["subscene_id"], scores);
        Reply(res, 200, {{"ok", true},
                         {"subscene_id", ack.subscene_id},
                         {"count", ack.count},
                         {"replaced", ack.replaced}});
      } catch (const ScoreRangeError& e) {
        ReplyError(res, 400, e.what());
      } catch (const UnknownSubSceneError& e) {
        ReplyError(res, 404, e.what());
      }
    });

    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      const Progress p = service.GetProgress();
      json buckets = json::object();
      for (std::size_t b = 0; b < p.buckets.size(); ++b) buckets[std::to_string(b)] = p.buckets[b];
      Reply(res, 200, {{"total", p.total},
                       {"buckets", std::move(buckets)},
                       {"annotators", p.per_annotator}});
    });

    server.Get(R"(/api/subscenes/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const msf::SubScene* s = service.Find(id);
      if (!s) {
        ReplyError(res, 404, "unknown sub-scene \"" + id + "\"");
        return;
      }
      Reply(res, 200, SubSceneJson(*s));
    });

    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const UnknownAnnotatorError& e) {
            ReplyError(res, 404, e.what());
          } catch (const DataError& e) {
            ReplyError(res, 400, e.what());
          } catch (const std::exception& e) {
            ReplyError(res, 500, e.what());
          }
        });
  }
};

AnnotationServer::AnnotationServer(AnnotationService& service,
                                   std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  impl_->Routes();
  if (!static_dir.empty() && !impl_->server.set_mount_point("/", static_dir.string())) {
    throw ConfigError("static directory " + static_dir.string() + " does not exist");
  }
}

AnnotationServer::~AnnotationServer() { Stop(); }

bool AnnotationServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int AnnotationServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool AnnotationServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void AnnotationServer::Stop() { impl_->server.stop(); }

void AnnotationServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace persona
