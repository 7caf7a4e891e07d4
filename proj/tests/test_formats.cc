#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "persona/error.h"
#include "persona/formats.h"

using namespace persona;

namespace {

msf::SubScene Sub(std::string main, std::vector<std::pair<std::string, std::string>> lines) {
  msf::SubScene s;
  s.episode_id = "e1";
  s.scene_id = "c1";
  s.main_speaker = std::move(main);
  s.start = 0;
  s.end = lines.empty() ? 0 : lines.size() - 1;
  for (std::size_t i = 0; i < lines.size(); ++i)
    s.utterances.push_back({lines[i].first, lines[i].second, i});
  return s;
}

std::multiset<std::string> Words(std::string_view text) {
  std::multiset<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.insert(w);
  return out;
}

}  // namespace

TEST_CASE("format names") {
  CHECK(FormatName(Format::kSingle) == "S");
  CHECK(FormatName(Format::kSingleContext) == "S+C");
  CHECK(FormatName(Format::kFull) == "F");
  CHECK(ParseFormat("sc") == Format::kSingleContext);
  CHECK(ParseFormat("S+C") == Format::kSingleContext);
  CHECK(ParseFormat("f") == Format::kFull);
  CHECK_FALSE(ParseFormat("X").has_value());
  CHECK(IsSpeakerMark("speaker12"));
  CHECK_FALSE(IsSpeakerMark("speaker"));
  CHECK_FALSE(IsSpeakerMark("speakerx"));
}

TEST_CASE("anonymize examples") {
  const auto a = Anonymize(Sub("Ross", {{"Rachel", "Hi Ross!"}, {"Ross", "hey"}}));
  CHECK(a.subscene.main_speaker == "speaker0");
  CHECK(a.subscene.utterances[0].speaker == "speaker1");
  CHECK(a.subscene.utterances[1].speaker == "speaker0");
  CHECK(a.subscene.utterances[0].text == "Hi speaker0!");
  CHECK(a.mapping == std::vector<std::pair<std::string, std::string>>{{"Ross", "speaker0"},
                                                                      {"Rachel", "speaker1"}});
  CHECK(a.source_id == "e1:c1:0-1:Ross");

  const auto solo = Anonymize(Sub("Joey", {{"Joey", "a"}, {"Joey", "b"}}));
  for (const auto& u : solo.subscene.utterances) CHECK(u.speaker == "speaker0");
}

TEST_CASE("in-text replacement is case-insensitive and whole-token") {
  const auto a = Anonymize(Sub("Ross", {{"Ross", "ROSS and rossy and ross's, Monica"},
                                        {"Monica", "Ross"}}));
  CHECK(a.subscene.utterances[0].text == "speaker0 and rossy and speaker0's, speaker1");
  CHECK(a.subscene.utterances[1].text == "speaker0");

  const auto kept = Anonymize(Sub("Ross", {{"Ross", "Ross"}}), {.replace_in_text = false});
  CHECK(kept.subscene.utterances[0].text == "Ross");
}

TEST_CASE("multi-word names are replaced as one unit") {
  const auto a = Anonymize(Sub("Mr. Geller", {{"Mr. Geller", "hi"}, {"Ross", "Hello mr. geller"}}));
  CHECK(a.subscene.utterances[1].text == "Hello speaker0");
}

TEST_CASE("transform examples") {
  const auto a = Anonymize(Sub("A", {{"A", "hi"}, {"B", "hey"}, {"A", "bye"}}));
  const auto s = ToSingle(a);
  CHECK(s.text == "hi bye");
  CHECK(s.format == Format::kSingle);
  CHECK(s.subscene_id == "e1:c1:0-2:A");
  CHECK(ToSingleContext(a).text == "hi bye <ctx> hey");
  CHECK(ToFull(a).text == "speaker0: hi\nspeaker1: hey\nspeaker0: bye");
  CHECK(ToFormat(a, Format::kFull).format == Format::kFull);

  const auto solo = Anonymize(Sub("A", {{"A", "hi"}, {"A", "bye"}}));
  CHECK(ToSingleContext(solo).text == "hi bye <ctx>");
  CHECK(ToFull(solo).text == "speaker0: hi\nspeaker0: bye");

  const auto none = Anonymize(Sub("A", {{"B", "hi"}}));
  CHECK_THROWS_AS(ToSingle(none), NoMainSpeakerUtterancesError);
  CHECK_THROWS_AS(ToSingleContext(none), NoMainSpeakerUtterancesError);
}

TEST_CASE("token conservation and anonymization involution on random sub-scenes") {
  oracle::Gen gen(2024);
  const std::vector<std::string> names = {"Ross", "Rachel", "Monica", "Chandler", "Joey", "Phoebe"};
  const std::vector<std::string> vocab = {"hi", "ok", "Ross", "coffee", "monica!", "we", "were",
                                          "on", "a", "break", "joey's", "pivot"};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen.Below(10);
    std::vector<std::pair<std::string, std::string>> lines;
    for (std::size_t i = 0; i < n; ++i) {
      std::string text;
      const std::size_t words = 1 + gen.Below(6);
      for (std::size_t w = 0; w < words; ++w) {
        if (w) text += ' ';
        text += vocab[gen.Below(vocab.size())];
      }
      lines.emplace_back(names[gen.Below(names.size())], text);
    }
    const std::string main = lines[gen.Below(n)].first;
    const auto a = Anonymize(Sub(main, lines));

    // bijection: distinct names map to distinct marks, each speaker covered
    std::set<std::string> marks, srcs;
    for (const auto& [name, mark] : a.mapping) {
      marks.insert(mark);
      srcs.insert(name);
    }
    CHECK(marks.size() == a.mapping.size());
    CHECK(srcs.size() == a.mapping.size());
    CHECK(a.mapping.front() == std::pair<std::string, std::string>{main, "speaker0"});
    for (const auto& u : a.subscene.utterances) CHECK(marks.count(u.speaker) == 1);

    // applying it twice is identity
    const auto twice = Anonymize(a.subscene);
    CHECK(twice.subscene.utterances == a.subscene.utterances);
    CHECK(twice.subscene.main_speaker == a.subscene.main_speaker);

    // F tokens without marks == S+C tokens without the separator
    std::multiset<std::string> full;
    std::istringstream lines_in(ToFull(a).text);
    std::size_t line_count = 0;
    for (std::string line; std::getline(lines_in, line); ++line_count) {
      const auto colon = line.find(": ");
      REQUIRE(colon != std::string::npos);
      CHECK(IsSpeakerMark(line.substr(0, colon)));
      full.merge(Words(line.substr(colon + 2)));
    }
    CHECK(line_count == n);
    auto sc = Words(ToSingleContext(a).text);
    CHECK(sc.count(std::string(kContextSeparator)) == 1);
    sc.erase(std::string(kContextSeparator));
    CHECK(full == sc);

    // S tokens are exactly the main speaker's
    std::multiset<std::string> main_words;
    for (const auto& u : a.subscene.utterances)
      if (u.speaker == "speaker0") main_words.merge(Words(u.text));
    CHECK(Words(ToSingle(a).text) == main_words);
  }
}
