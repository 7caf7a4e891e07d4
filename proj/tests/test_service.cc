#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "oracles.h"
#include "persona/error.h"
#include "persona/service.h"

using namespace persona;
using json = nlohmann::json;

namespace {

std::vector<msf::SubScene> Corpus() {
  std::vector<msf::SubScene> out;
  for (int i = 0; i < 3; ++i) {
    msf::SubScene s;
    s.episode_id = "s01e01";
    s.scene_id = "c" + std::to_string(i);
    s.main_speaker = "Ross";
    s.start = 0;
    s.end = 1;
    s.utterances = {{"Ross", "hi " + std::to_string(i), 0}, {"Rachel", "hey", 1}};
    out.push_back(s);
  }
  return out;
}

std::string Id(int i) { return "s01e01:c" + std::to_string(i) + ":0-1:Ross"; }

constexpr PerTrait<int> kScores = {1, 0, -1, 0, 1};

json Body(const std::string& who, const std::string& id, PerTrait<int> s = kScores) {
  json scores;
  for (Trait t : kAllTraits) scores[std::string(TraitName(t))] = s[Index(t)];
  return {{"annotator", who}, {"subscene_id", id}, {"scores", scores}};
}

struct Running {
  AnnotationService& service;
  AnnotationServer server;
  int port;
  std::thread thread;

  explicit Running(AnnotationService& s, std::filesystem::path dir = {})
      : service(s), server(s, std::move(dir)), port(server.BindToAnyPort("127.0.0.1")) {
    thread = std::thread([this] { server.ListenAfterBind(); });
    server.WaitUntilReady();
  }
  ~Running() {
    server.Stop();
    thread.join();
  }
  httplib::Client Client() const { return httplib::Client("127.0.0.1", port); }
};

}  // namespace

TEST_CASE("service assigns least-annotated work first") {
  AnnotationService svc(Corpus(), {{"w1", ""}, {"w2", ""}, {"w3", ""}});
  CHECK(svc.NextTask("w1")->subscene_id == Id(0));
  svc.Submit("w1", Id(0), kScores);
  CHECK(svc.NextTask("w1")->subscene_id == Id(1));
  CHECK(svc.NextTask("w2")->subscene_id == Id(1));
  svc.Submit("w2", Id(1), kScores);
  CHECK(svc.NextTask("w3")->subscene_id == Id(2));
  svc.Submit("w1", Id(1), kScores);
  svc.Submit("w1", Id(2), kScores);
  CHECK_FALSE(svc.NextTask("w1").has_value());
  CHECK(svc.NextTask("w1") == std::nullopt);

  const auto task = svc.NextTask("w2");
  REQUIRE(task);
  CHECK(task->subscene.main_speaker == "Ross");  // real names for annotators
  CHECK(task->remaining_traits.size() == kNumTraits);

  const auto p = svc.GetProgress();
  CHECK(p.total == 3);
  CHECK(p.buckets == std::array<std::size_t, 4>{0, 2, 1, 0});
  CHECK(p.per_annotator.at("w1") == 3);
  CHECK(p.per_annotator.at("w2") == 1);
}

TEST_CASE("service rejects bad submissions without writing") {
  AnnotationService svc(Corpus(), {{"w1", ""}});
  std::size_t logged = 0;
  svc.SetLogSink([&](const AnnotationRecord&) { ++logged; });
  CHECK_THROWS_AS(svc.Submit("nobody", Id(0), kScores), UnknownAnnotatorError);
  CHECK_THROWS_AS(svc.Submit("w1", "missing", kScores), UnknownSubSceneError);
  CHECK_THROWS_AS(svc.Submit("w1", Id(0), {2, 0, 0, 0, 0}), ScoreRangeError);
  CHECK_THROWS_AS(svc.NextTask("nobody"), UnknownAnnotatorError);
  CHECK(svc.Records().empty());
  CHECK(logged == 0);

  const auto first = svc.Submit("w1", Id(0), kScores);
  CHECK_FALSE(first.replaced);
  CHECK(first.count == 1);
  const auto second = svc.Submit("w1", Id(0), {0, 0, 0, 0, 0});
  CHECK(second.replaced);
  CHECK(second.count == 1);
  CHECK(logged == 2);
  CHECK(svc.Records().front().scores == PerTrait<int>{0, 0, 0, 0, 0});
}

TEST_CASE("append sink persists replayable lines") {
  const auto path = std::filesystem::temp_directory_path() / "persona_service_store.jsonl";
  std::filesystem::remove(path);
  {
    AnnotationService svc(Corpus(), {{"w1", ""}, {"w2", ""}});
    svc.SetLogSink(AppendToFile(path));
    svc.Submit("w1", Id(0), kScores);
    svc.Submit("w2", Id(0), kScores);
    svc.Submit("w1", Id(0), {0, 0, 0, 0, 0});
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  AnnotationStore store;
  store.Replay(ss.str());
  CHECK(store.Records().size() == 2);
  CHECK(store.CountFor(Id(0)) == 2);
  AnnotationService resumed(Corpus(), {{"w1", ""}}, store);
  CHECK(resumed.NextTask("w1")->subscene_id == Id(1));
  std::filesystem::remove(path);
}

TEST_CASE("concurrent submissions are all recorded") {
  std::vector<Annotator> people;
  for (int i = 0; i < 8; ++i) people.push_back({"w" + std::to_string(i), ""});
  AnnotationService svc(Corpus(), people);
  std::atomic<int> logged = 0;
  svc.SetLogSink([&](const AnnotationRecord&) { ++logged; });
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      for (int rep = 0; rep < 20; ++rep) {
        const auto task = svc.NextTask("w" + std::to_string(i));
        svc.Submit("w" + std::to_string(i), task ? task->subscene_id : Id(rep % 3), kScores);
        svc.GetProgress();
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(logged == 160);
  CHECK(svc.Records().size() == 24);
  CHECK(svc.GetProgress().buckets[3] == 3);
}

TEST_CASE("HTTP API round trip") {
  AnnotationService svc(Corpus(), {{"alice", "s3cret"}, {"bob", ""}});
  Running run(svc);
  auto cli = run.Client();
  const httplib::Headers auth = {{"Authorization", "Bearer s3cret"}};

  auto next = cli.Get("/api/tasks/next?annotator=alice", auth);
  REQUIRE(next);
  CHECK(next->status == 200);
  auto body = json::parse(next->body);
  CHECK(body["done"] == false);
  CHECK(body["task"]["subscene_id"] == Id(0));
  CHECK(body["task"]["main_speaker"] == "Ross");
  CHECK(body["task"]["utterances"][0]["is_main"] == true);
  CHECK(body["task"]["utterances"][1]["is_main"] == false);
  CHECK(body["task"]["remaining_traits"].size() == 5);

  auto post = cli.Post("/api/annotations", auth, Body("alice", Id(0)).dump(), "application/json");
  REQUIRE(post);
  CHECK(post->status == 200);
  body = json::parse(post->body);
  CHECK(body["ok"] == true);
  CHECK(body["count"] == 1);
  CHECK(body["replaced"] == false);

  auto bob = cli.Post("/api/annotations", Body("bob", Id(0)).dump(), "application/json");
  REQUIRE(bob);
  CHECK(bob->status == 200);

  auto prog = cli.Get("/api/progress");
  REQUIRE(prog);
  body = json::parse(prog->body);
  CHECK(body["total"] == 3);
  CHECK(body["buckets"]["0"] == 2);
  CHECK(body["buckets"]["2"] == 1);
  CHECK(body["annotators"]["alice"] == 1);

  auto sub = cli.Get("/api/subscenes/" + httplib::detail::encode_url(Id(1)));
  REQUIRE(sub);
  CHECK(sub->status == 200);
  CHECK(json::parse(sub->body)["scene_id"] == "c1");

  const auto records = svc.Records();
  REQUIRE(records.size() == 2);
  CHECK(records[0].scores == kScores);
}

TEST_CASE("HTTP API error statuses") {
  AnnotationService svc(Corpus(), {{"alice", "s3cret"}});
  Running run(svc);
  auto cli = run.Client();
  const httplib::Headers auth = {{"Authorization", "Bearer s3cret"}};
  const httplib::Headers wrong = {{"Authorization", "Bearer nope"}};

  CHECK(cli.Get("/api/tasks/next")->status == 400);
  CHECK(cli.Get("/api/tasks/next?annotator=alice")->status == 401);
  CHECK(cli.Get("/api/tasks/next?annotator=alice", wrong)->status == 401);
  CHECK(cli.Get("/api/tasks/next?annotator=zed", auth)->status == 404);
  CHECK(cli.Get("/api/subscenes/nothing")->status == 404);

  CHECK(cli.Post("/api/annotations", auth, "{oops", "application/json")->status == 400);
  CHECK(cli.Post("/api/annotations", auth, R"({"annotator":"alice"})", "application/json")->status ==
        400);
  CHECK(cli.Post("/api/annotations", wrong, Body("alice", Id(0)).dump(), "application/json")
            ->status == 401);
  CHECK(cli.Post("/api/annotations", auth, Body("alice", "missing").dump(), "application/json")
            ->status == 404);
  CHECK(cli.Post("/api/annotations", auth, Body("alice", Id(0), {5, 0, 0, 0, 0}).dump(),
                 "application/json")
            ->status == 400);
  auto missing_trait = Body("alice", Id(0));
  missing_trait["scores"].erase("NEU");
  CHECK(cli.Post("/api/annotations", auth, missing_trait.dump(), "application/json")->status ==
        400);
  CHECK(svc.Records().empty());
}

TEST_CASE("HTTP server serves a static bundle") {
  const auto dir = std::filesystem::temp_directory_path() / "persona_static_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<p>annotate</p>";
  AnnotationService svc(Corpus(), {{"w", ""}});
  {
    Running run(svc, dir);
    auto cli = run.Client();
    auto res = cli.Get("/index.html");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "<p>annotate</p>");
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(AnnotationServer(svc, dir), ConfigError);
}

TEST_CASE("HTTP concurrent posts") {
  std::vector<Annotator> people;
  for (int i = 0; i < 6; ++i) people.push_back({"w" + std::to_string(i), ""});
  AnnotationService svc(Corpus(), people);
  Running run(svc);
  std::vector<std::thread> threads;
  std::atomic<int> ok = 0;
  for (int i = 0; i < 6; ++i) {
    threads.emplace_back([&, i] {
      auto cli = run.Client();
      for (int j = 0; j < 3; ++j) {
        auto r = cli.Post("/api/annotations", Body("w" + std::to_string(i), Id(j)).dump(),
                          "application/json");
        ok += r && r->status == 200;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 18);
  CHECK(svc.Records().size() == 18);
}
