#include "persona/msf.h"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <utility>

#include "persona/error.h"

namespace persona::msf {

void WindowConfig::Validate() const {
  if (window_size < 1) throw ConfigError("window_size must be >= 1");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (min_peak_count > window_size) {
    throw ConfigError("min_peak_count (" + std::to_string(min_peak_count) +
                      ") exceeds window_size (" + std::to_string(window_size) +
                      ")");
  }
}

std::string SubScene::Id() const {
  return episode_id + ":" + scene_id + ":" + std::to_string(start) + "-" +
         std::to_string(end) + ":" + main_speaker;
}

std::size_t NumPositions(std::size_t n, const WindowConfig& config) {
  if (n <= config.window_size) return 1;
  return (n - config.window_size) / config.stride + 1;
}

std::vector<UtteranceCurve> UtteranceCurves(const Scene& scene,
                                            const WindowConfig& config) {
  config.Validate();
  const std::size_t n = scene.utterances.size();
  if (n == 0) {
    throw EmptySceneError("scene " + scene.episode_id + ":" + scene.scene_id +
                          " has no utterances");
  }

  std::vector<UtteranceCurve> curves;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::size_t> speaker_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = scene.utterances[i].speaker;
    auto [it, inserted] = slot.try_emplace(name, curves.size());
    if (inserted) curves.push_back({name, {}});
    speaker_of[i] = it->second;
  }

  const std::size_t positions = NumPositions(n, config);
  const std::size_t width = std::min(config.window_size, n);
  for (auto& c : curves) c.values.assign(positions, 0);

  for (std::size_t k = 0; k < positions; ++k) {
    const std::size_t begin = k * config.stride;
    for (std::size_t i = begin; i < begin + width; ++i) {
      ++curves[speaker_of[i]].values[k];
    }
  }
  return curves;
}

std::vector<std::size_t> FindPeaks(const UtteranceCurve& curve,
                                   const WindowConfig& config) {
  const auto& v = curve.values;
  std::vector<std::size_t> peaks;
  for (std::size_t p = 0; p < v.size(); ++p) {
    if (v[p] < config.min_peak_count) continue;
    if (p > 0 && v[p - 1] >= v[p]) continue;  // lower-left or inside a plateau
    if (p + 1 < v.size() && v[p + 1] > v[p]) continue;
    peaks.push_back(p);
  }
  return peaks;
}

std::size_t PlateauEnd(const UtteranceCurve& curve, std::size_t peak) {
  std::size_t q = peak;
  while (q + 1 < curve.values.size() && curve.values[q + 1] == curve.values[peak]) {
    ++q;
  }
  return q;
}

std::vector<SubScene> ExtractSubScenes(const Scene& scene,
                                       const WindowConfig& config) {
  const std::vector<UtteranceCurve> curves = UtteranceCurves(scene, config);
  const std::size_t n = scene.utterances.size();

  std::vector<SubScene> out;
  std::set<std::pair<std::string, std::pair<std::size_t, std::size_t>>> seen;
  for (const UtteranceCurve& curve : curves) {
    for (std::size_t peak : FindPeaks(curve, config)) {
      const std::size_t last = PlateauEnd(curve, peak);
      std::size_t start = peak * config.stride;
      std::size_t end =
          std::min(last * config.stride + config.window_size, n) - 1;
      start = start >= config.pad ? start - config.pad : 0;
      end = std::min(end + config.pad, n - 1);
      if (!seen.insert({curve.speaker, {start, end}}).second) continue;

      SubScene sub;
      sub.episode_id = scene.episode_id;
      sub.scene_id = scene.scene_id;
      sub.main_speaker = curve.speaker;
      sub.start = start;
      sub.end = end;
      sub.peak_position = peak;
      sub.utterances.assign(scene.utterances.begin() + start,
                            scene.utterances.begin() + end + 1);
      out.push_back(std::move(sub));
    }
  }
  return out;
}

}  // namespace persona::msf
