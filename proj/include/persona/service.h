#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "persona/annotation.h"
#include "persona/msf.h"

namespace persona {

struct Annotator {
  std::string id;
  std::string token;  // empty: no bearer token required
};

struct AnnotationTask {
  std::string subscene_id;
  msf::SubScene subscene;  // real speaker names
  std::vector<Trait> remaining_traits;
};

struct SubmitAck {
  std::string subscene_id;
  std::size_t count = 0;  // annotations on the sub-scene after this write
  bool replaced = false;
};

struct Progress {
  std::size_t total = 0;
  std::array<std::size_t, 4> buckets{};  // sub-scenes with 0, 1, 2, >=3 annotations
  std::map<std::string, std::size_t> per_annotator;
};

// Issues tasks and records judgments. Thread-safe: all store writes hold an
// exclusive lock, reads a shared one.
class AnnotationService {
 public:
  // `store` may already hold replayed records; it must accept every corpus id.
  AnnotationService(std::vector<msf::SubScene> corpus, std::vector<Annotator> annotators,
                    AnnotationStore store = {});

  // A sub-scene the annotator has not judged, fewest annotations first (ties
  // by corpus order); nullopt once the annotator has covered the corpus.
  // Throws UnknownAnnotatorError.
  std::optional<AnnotationTask> NextTask(const std::string& annotator_id) const;

  // Throws UnknownAnnotatorError, UnknownSubSceneError, ScoreRangeError.
  // Nothing is persisted on error.
  SubmitAck Submit(const std::string& annotator_id, const std::string& subscene_id,
                   const PerTrait<int>& scores);

  Progress GetProgress() const;

  const msf::SubScene* Find(const std::string& subscene_id) const;
  const Annotator* FindAnnotator(const std::string& annotator_id) const;

  // Every accepted record is forwarded here while the write lock is held.
  void SetLogSink(std::function<void(const AnnotationRecord&)> sink);

  std::vector<AnnotationRecord> Records() const;

 private:
  std::vector<msf::SubScene> corpus_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, Annotator> annotators_;
  mutable std::shared_mutex mu_;
  AnnotationStore store_;
};

// Appends every record to a line-delimited file, flushing per line.
std::function<void(const AnnotationRecord&)> AppendToFile(const std::filesystem::path& path);

// HTTP+JSON front end:
//   GET  /api/tasks/next?annotator=ID
//   POST /api/annotations  {annotator, subscene_id, scores: {AGR..NEU}}
//   GET  /api/progress
//   GET  /api/subscenes/{id}
// plus static files mounted at "/" when a directory is given.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationService& service,
                            std::filesystem::path static_dir = {});
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Blocks until Stop().
  bool Listen(const std::string& host, int port);
  // Binds to a free port and returns it; serve with ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace persona
