#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "persona/formats.h"
#include "persona/msf.h"

namespace persona::io {

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Sub-scene lines:
//   {"subscene_id", "episode_id", "scene_id", "main_speaker", "start", "end",
//    "peak_position", "utterances": [{"index", "speaker", "text"}]}
std::string SubSceneToJsonLine(const msf::SubScene& s);
msf::SubScene SubSceneFromJsonLine(std::string_view line);
std::string WriteSubScenes(const std::vector<msf::SubScene>& subscenes);
std::vector<msf::SubScene> ReadSubScenes(std::string_view jsonl);

// Item lines:
//   {"subscene_id", "format": "S"|"S+C"|"F", "text", "labels": {"AGR": 0|1, ..}}
// "labels" is omitted for unlabeled items.
std::string ItemToJsonLine(const FormattedItem& item);
FormattedItem ItemFromJsonLine(std::string_view line);
std::string WriteItems(const std::vector<FormattedItem>& items);
std::vector<FormattedItem> ReadItems(std::string_view jsonl);

}  // namespace persona::io
