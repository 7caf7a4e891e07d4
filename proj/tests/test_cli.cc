#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "oracles.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run Cli(const std::string& args) {
  const std::string cmd = std::string(PERSONA_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t Lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("persona_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const fs::path kData = PERSONA_TEST_DATA;

// A larger synthetic transcript so cross-validation has items to split.
void WriteSyntheticTranscript(const fs::path& path) {
  oracle::Gen gen(31);
  const std::vector<std::string> names = {"Ross", "Rachel", "Monica", "Joey"};
  const std::vector<std::string> words = {"coffee", "we", "were", "on", "a", "break",
                                          "happy", "sad", "pivot", "dinosaur", "cat"};
  json episodes = json::array();
  for (int e = 0; e < 3; ++e) {
    json scenes = json::array();
    for (int s = 0; s < 4; ++s) {
      json utts = json::array();
      for (int i = 0; i < 14; ++i) {
        const std::string who = i % 5 ? names[gen.Below(2)] : names[gen.Below(4)];
        std::string text;
        for (int w = 0; w < 5; ++w) text += (w ? " " : "") + words[gen.Below(words.size())];
        utts.push_back({{"speaker", who}, {"text", text}});
      }
      scenes.push_back({{"scene_id", "c" + std::to_string(s)}, {"utterances", utts}});
    }
    episodes.push_back({{"episode_id", "e" + std::to_string(e)}, {"scenes", scenes}});
  }
  std::ofstream(path) << json{{"episodes", episodes}}.dump();
}

void WriteStore(const fs::path& subscenes, const fs::path& store) {
  oracle::Gen gen(5);
  std::ifstream in(subscenes);
  std::ofstream out(store);
  for (std::string line; std::getline(in, line);) {
    const auto id = json::parse(line)["subscene_id"].get<std::string>();
    for (const char* w : {"w1", "w2", "w3"}) {
      json r = {{"subscene_id", id}, {"annotator_id", w}};
      for (const char* t : {"AGR", "CON", "EXT", "OPN", "NEU"}) r[t] = gen.Range(-1, 1);
      r["ts"] = "2026-10-16T00:00:00Z";
      out << r.dump() << "\n";
    }
  }
}

}  // namespace

TEST_CASE("ingest and extract a small transcript") {
  const auto dir = Scratch("extract");
  const auto tr = (kData / "mini_transcript.json").string();
  auto r = Cli("ingest --in " + tr);
  CHECK(r.code == 0);
  CHECK(r.out.find("utterances 16") != std::string::npos);

  r = Cli("extract --in " + tr + " --out " + (dir / "subs.jsonl").string());
  CHECK(r.code == 0);
  const auto subs = Slurp(dir / "subs.jsonl");
  REQUIRE(Lines(subs) == 2);
  std::istringstream lines(subs);
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(json::parse(first)["subscene_id"] == "s01e01:c01:0-6:Monica");
  CHECK(json::parse(second)["subscene_id"] == "s01e01:c02:0-5:Rachel");

  r = Cli("ingest --in " + tr + " --out " + (dir / "canon.json").string());
  CHECK(r.code == 0);
  r = Cli("extract --in " + (dir / "canon.json").string() + " --out " +
          (dir / "subs2.jsonl").string());
  CHECK(r.code == 0);
  CHECK(Slurp(dir / "subs2.jsonl") == subs);
  fs::remove_all(dir);
}

TEST_CASE("extract, aggregate, format, eval pipeline") {
  const auto dir = Scratch("pipeline");
  const auto p = [&](const char* f) { return (dir / f).string(); };
  WriteSyntheticTranscript(dir / "t.json");
  REQUIRE(Cli("extract --in " + p("t.json") + " --out " + p("subs.jsonl")).code == 0);
  const std::size_t n = Lines(Slurp(dir / "subs.jsonl"));
  REQUIRE(n >= 10);
  WriteStore(dir / "subs.jsonl", dir / "store.jsonl");

  auto r = Cli("agree --store " + p("store.jsonl"));
  CHECK(r.code == 0);
  CHECK(r.out.find("fleiss") != std::string::npos);

  r = Cli("aggregate --store " + p("store.jsonl") + " --subscenes " + p("subs.jsonl") +
          " --out " + p("labels.csv"));
  CHECK(r.code == 0);
  const auto labels = Slurp(dir / "labels.csv");
  CHECK(labels.rfind("subscene_id,main_speaker,AGR,CON,EXT,OPN,NEU\n", 0) == 0);
  CHECK(Lines(labels) == n + 1);

  for (const char* mode : {"S", "SC", "F"}) {
    const std::string items = p("items_") + mode + ".jsonl";
    r = Cli(std::string("format --mode ") + mode + " --in " + p("subs.jsonl") + " --labels " +
            p("labels.csv") + " --out " + items);
    CHECK(r.code == 0);
    CHECK(Lines(Slurp(items)) == n);
  }
  std::ifstream sc(dir / "items_SC.jsonl");
  for (std::string line; std::getline(sc, line);) {
    const auto item = json::parse(line);
    const auto text = item["text"].get<std::string>();
    CHECK(item["format"] == "S+C");
    CHECK(text.find("<ctx>") != std::string::npos);
    for (const char* name : {"Ross", "Rachel", "Monica", "Joey"})
      CHECK(text.find(name) == std::string::npos);
  }

  r = Cli("eval --dataset friends --format S --model majority --in " + p("items_S.jsonl") +
          " --out " + p("res.csv"));
  CHECK(r.code == 0);
  const auto res = Slurp(dir / "res.csv");
  CHECK(res.rfind("model,format,AGR,CON,EXT,OPN,NEU\nmajority,S,", 0) == 0);

  r = Cli("eval --dataset friends --format F --model memorize --smoke --in " + p("items_F.jsonl") +
          " --out " + p("smoke.csv"));
  CHECK(r.code == 0);
  CHECK(Slurp(dir / "smoke.csv") ==
        "model,format,AGR,CON,EXT,OPN,NEU\nmemorize,F,100.00,100.00,100.00,100.00,100.00\n");

  r = Cli("eval --dataset friends --format SC --model logreg --style markdown --in " +
          p("items_SC.jsonl"));
  CHECK(r.code == 0);
  CHECK(r.out.find("| logreg | S+C |") != std::string::npos);

  // Same seed, same output.
  REQUIRE(Cli("eval --dataset friends --format S --model majority --in " + p("items_S.jsonl") +
              " --out " + p("res2.csv"))
              .code == 0);
  CHECK(Slurp(dir / "res2.csv") == res);
  fs::remove_all(dir);
}

TEST_CASE("essays eval") {
  const auto dir = Scratch("essays");
  std::ofstream csv(dir / "essays.csv");
  csv << "#AUTHID,TEXT,cEXT,cNEU,cAGR,cCON,cOPN\n";
  for (int i = 0; i < 20; ++i)
    csv << "a" << i << ",\"essay number " << i << "\"," << (i % 2 ? "y" : "n") << ",n,"
        << (i < 14 ? "true" : "false") << ",y," << (i % 3 ? "n" : "y") << "\n";
  csv.close();
  auto r = Cli("eval --dataset essays --model majority --k 5 --in " + (dir / "essays.csv").string() +
               " --out " + (dir / "r.csv").string());
  CHECK(r.code == 0);
  const auto out = Slurp(dir / "r.csv");
  CHECK(out.rfind("model,AGR,CON,EXT,OPN,NEU\nmajority,", 0) == 0);

  r = Cli("eval --dataset essays --model majority --dominant-share --in " +
          (dir / "essays.csv").string() + " --out " + (dir / "d.csv").string());
  CHECK(r.code == 0);
  // AGR: 14 of 20 are y; EXT: 10/10; NEU: all n; CON: all y; OPN: 7 of 20 are y.
  CHECK(Slurp(dir / "d.csv") == "model,AGR,CON,EXT,OPN,NEU\nmajority,70.00,100.00,50.00,65.00,100.00\n");
  CHECK(Cli("eval --dataset essays --model logreg --dominant-share --in " +
            (dir / "essays.csv").string())
            .code == 3);
  fs::remove_all(dir);
}

TEST_CASE("split prints a plan") {
  auto r = Cli("split --n 11 --k 10 --seed 42");
  CHECK(r.code == 0);
  const auto plan = json::parse(r.out);
  CHECK(plan["folds"].size() == 10);
  CHECK(plan["n_items"] == 11);
  CHECK(Cli("split --n 5 --k 10").code == 3);
}

TEST_CASE("exit codes") {
  CHECK(Cli("").code != 0);
  CHECK(Cli("bogus").code == 3);
  CHECK(Cli("extract --in /nonexistent/file.json").code == 3);
  CHECK(Cli("extract --in " + (kData / "bad_transcript.json").string()).code == 2);
  CHECK(Cli("extract --window 0 --in " + (kData / "mini_transcript.json").string()).code == 3);
  CHECK(Cli("format --mode Q --in " + (kData / "mini_transcript.json").string()).code == 3);
  CHECK(Cli("eval --model nope --in " + (kData / "mini_transcript.json").string()).code == 3);
}
