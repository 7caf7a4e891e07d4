#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "persona/transcript.h"

namespace persona::msf {

struct WindowConfig {
  std::size_t window_size = 5;
  std::size_t stride = 1;
  std::size_t min_peak_count = 3;
  // Extra utterances of context added on each side of a sub-scene span.
  std::size_t pad = 0;

  // Throws ConfigError unless window_size >= 1, stride >= 1 and
  // min_peak_count <= window_size.
  void Validate() const;
};

// Windowed utterance counts for one speaker. values[k] counts the speaker's
// turns in window k, which covers utterances
// [k * stride, k * stride + window_size - 1]. A scene shorter than the window
// has exactly one position covering the whole scene.
struct UtteranceCurve {
  std::string speaker;
  std::vector<std::size_t> values;

  bool operator==(const UtteranceCurve&) const = default;
};

struct SubScene {
  std::string episode_id;
  std::string scene_id;
  std::string main_speaker;
  std::size_t start = 0;  // inclusive utterance indices within the scene
  std::size_t end = 0;
  std::size_t peak_position = 0;  // window index of the producing peak
  std::vector<Utterance> utterances;

  // "<episode>:<scene>:<start>-<end>:<main_speaker>", unique per corpus.
  std::string Id() const;

  bool operator==(const SubScene&) const = default;
};

// Number of window positions for a scene of n utterances.
std::size_t NumPositions(std::size_t n, const WindowConfig& config);

// One curve per distinct speaker, in order of first appearance. Throws
// EmptySceneError for a scene without utterances.
std::vector<UtteranceCurve> UtteranceCurves(const Scene& scene,
                                            const WindowConfig& config);

// Peak positions in ascending order. Position p is a peak when
//   values[p] >= min_peak_count,
//   values[p] >= values[p-1] and values[p] >= values[p+1] where they exist,
//   p is the leftmost position of its plateau (run of equal values).
std::vector<std::size_t> FindPeaks(const UtteranceCurve& curve,
                                   const WindowConfig& config);

// Last position of the plateau that starts at `peak`.
std::size_t PlateauEnd(const UtteranceCurve& curve, std::size_t peak);

// Sub-scenes for every speaker's peaks. Each span is the peak window widened
// to the end of the peak's plateau, padded by config.pad and clipped to the
// scene. Duplicate (main_speaker, span) pairs are emitted once. Order: speakers
// by first appearance, then peaks ascending.
std::vector<SubScene> ExtractSubScenes(const Scene& scene,
                                       const WindowConfig& config);

}  // namespace persona::msf
