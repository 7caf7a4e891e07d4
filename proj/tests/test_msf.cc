#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "persona/error.h"
#include "persona/msf.h"

using namespace persona;
using namespace persona::msf;

namespace {

std::vector<std::string> Split(const std::string& letters) {
  std::vector<std::string> out;
  for (char c : letters) out.emplace_back(1, c);
  return out;
}

UtteranceCurve Curve(std::vector<std::size_t> v) { return {"A", std::move(v)}; }

}  // namespace

TEST_CASE("window config validation") {
  WindowConfig c;
  CHECK_NOTHROW(c.Validate());
  c.window_size = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = {};
  c.stride = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = {};
  c.min_peak_count = 6;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("utterance_curves examples") {
  const WindowConfig c;
  SUBCASE("constant speaker") {
    const auto curves = UtteranceCurves(oracle::MakeScene(Split("AAAAAA")), c);
    REQUIRE(curves.size() == 1);
    CHECK(curves[0].values == std::vector<std::size_t>{5, 5});
  }
  SUBCASE("alternating speakers") {
    const auto curves = UtteranceCurves(oracle::MakeScene(Split("ABABABA")), c);
    REQUIRE(curves.size() == 2);
    CHECK(curves[0] == UtteranceCurve{"A", {3, 2, 3}});
    CHECK(curves[1] == UtteranceCurve{"B", {2, 3, 2}});
  }
  SUBCASE("scene shorter than the window") {
    const auto curves = UtteranceCurves(oracle::MakeScene(Split("AAB")), c);
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].values == std::vector<std::size_t>{2});
    CHECK(curves[1].values == std::vector<std::size_t>{1});
  }
  SUBCASE("empty scene") {
    CHECK_THROWS_AS(UtteranceCurves(oracle::MakeScene({}), c), EmptySceneError);
    CHECK_THROWS_AS(ExtractSubScenes(oracle::MakeScene({}), c), EmptySceneError);
  }
}

TEST_CASE("utterance_curves with stride") {
  WindowConfig c;
  c.window_size = 3;
  c.stride = 2;
  // windows [0,2] [2,4] [4,6]
  const auto curves = UtteranceCurves(oracle::MakeScene(Split("AABBABB")), c);
  CHECK(NumPositions(7, c) == 3);
  CHECK(curves[0].values == std::vector<std::size_t>{2, 1, 1});
  CHECK(curves[1].values == std::vector<std::size_t>{1, 2, 2});

  c.window_size = 2;
  c.stride = 3;
  c.min_peak_count = 1;
  // windows [0,1] [3,4], gaps are not counted
  const auto gapped = UtteranceCurves(oracle::MakeScene(Split("ABBAB")), c);
  CHECK(gapped[0].values == std::vector<std::size_t>{1, 1});
  CHECK(gapped[1].values == std::vector<std::size_t>{1, 1});
}

TEST_CASE("find_peaks examples") {
  const WindowConfig c;  // min_peak_count 3
  CHECK(FindPeaks(Curve({1, 3, 1}), c) == std::vector<std::size_t>{1});
  CHECK(FindPeaks(Curve({2, 3, 3, 2}), c) == std::vector<std::size_t>{1});
  CHECK(FindPeaks(Curve({5, 5}), c) == std::vector<std::size_t>{0});
  CHECK(FindPeaks(Curve({2, 2, 2}), c).empty());
  CHECK(FindPeaks(Curve({4, 3, 4}), c) == std::vector<std::size_t>{0, 2});
  CHECK(FindPeaks(Curve({3}), c) == std::vector<std::size_t>{0});
  // Rising shoulder: index 1 is >= both neighbours and starts its plateau.
  CHECK(FindPeaks(Curve({1, 3, 3, 4}), c) == std::vector<std::size_t>{1, 3});
}

TEST_CASE("extract_subscenes examples") {
  const WindowConfig c;
  SUBCASE("single speaker, single plateau") {
    const auto subs = ExtractSubScenes(oracle::MakeScene(Split("AAAAAAAAAA")), c);
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].main_speaker == "A");
    CHECK(subs[0].start == 0);
    CHECK(subs[0].end == 9);
    CHECK(subs[0].utterances.size() == 10);
  }
  SUBCASE("two main speakers") {
    // A = [4,4,3,2,2,1], B = [1,1,2,3,3,4] (hand-enumerated windows).
    const auto scene = oracle::MakeScene(Split("AAABAABBBB"));
    const auto curves = UtteranceCurves(scene, c);
    CHECK(curves[0].values == std::vector<std::size_t>{4, 4, 3, 2, 2, 1});
    CHECK(curves[1].values == std::vector<std::size_t>{1, 1, 2, 3, 3, 4});
    const auto subs = ExtractSubScenes(scene, c);
    REQUIRE(subs.size() == 3);
    CHECK(subs[0].main_speaker == "A");
    CHECK(subs[0].start == 0);
    CHECK(subs[0].end == 5);
    CHECK(subs[0].peak_position == 0);
    CHECK(subs[1].main_speaker == "B");
    CHECK(subs[1].start == 3);
    CHECK(subs[1].end == 8);
    CHECK(subs[2].main_speaker == "B");
    CHECK(subs[2].start == 5);
    CHECK(subs[2].end == 9);
    CHECK(subs[2].Id() == "e:s:5-9:B");
  }
  SUBCASE("no curve reaches min_peak_count") {
    CHECK(ExtractSubScenes(oracle::MakeScene(Split("ABCABCABC")), c).empty());
  }
  SUBCASE("padding clips to the scene") {
    WindowConfig padded;
    padded.pad = 2;
    const auto subs = ExtractSubScenes(oracle::MakeScene(Split("BBAAAAABB")), padded);
    // A = [3,4,5,4,3]; peak at 2 -> window [2,6] -> padded [0,8]
    REQUIRE(subs.size() == 1);
    CHECK(subs[0].start == 0);
    CHECK(subs[0].end == 8);
  }
  SUBCASE("duplicate spans emitted once") {
    WindowConfig w1;
    w1.window_size = 1;
    w1.min_peak_count = 1;
    w1.pad = 5;
    // A peaks at 0 and 2; both pad out to the whole scene.
    const auto subs = ExtractSubScenes(oracle::MakeScene(Split("ABA")), w1);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].main_speaker == "A");
    CHECK(subs[1].main_speaker == "B");
  }
}

TEST_CASE("msf properties on random scenes") {
  oracle::Gen gen(2024);
  const std::vector<std::string> names = {"A", "B", "C"};
  const WindowConfig c;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen.Below(12);
    const std::size_t k = 1 + gen.Below(3);
    std::vector<std::string> speakers;
    for (std::size_t i = 0; i < n; ++i) speakers.push_back(names[gen.Below(k)]);
    const Scene scene = oracle::MakeScene(speakers);

    const auto curves = UtteranceCurves(scene, c);
    for (std::size_t p = 0; p < NumPositions(n, c); ++p) {
      std::size_t mass = 0;
      for (const auto& cv : curves) mass += cv.values[p];
      REQUIRE(mass == std::min(c.window_size, n));
    }

    const auto subs = ExtractSubScenes(scene, c);
    CHECK(subs == ExtractSubScenes(scene, c));

    const auto expected = oracle::SubScenes(speakers, c.window_size, c.min_peak_count);
    REQUIRE(subs.size() == expected.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
      CHECK(subs[i].main_speaker == expected[i].speaker);
      CHECK(subs[i].start == expected[i].start);
      CHECK(subs[i].end == expected[i].end);
      CHECK(subs[i].peak_position == expected[i].peak);
    }

    for (const SubScene& s : subs) {
      REQUIRE(s.end < n);
      REQUIRE(s.utterances.size() == s.end - s.start + 1);
      // Main speaker dominates the peak window and its count equals the curve.
      const std::size_t lo = s.peak_position;
      const std::size_t hi = std::min(n, lo + c.window_size);
      std::map<std::string, std::size_t> counts;
      for (std::size_t i = lo; i < hi; ++i) ++counts[speakers[i]];
      const auto& curve = *std::find_if(curves.begin(), curves.end(),
                                        [&](const auto& cv) { return cv.speaker == s.main_speaker; });
      CHECK(counts[s.main_speaker] == curve.values[s.peak_position]);
      for (const auto& [who, cnt] : counts) CHECK(counts[s.main_speaker] >= cnt);
    }
  }
}
