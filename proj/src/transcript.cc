#include "persona/transcript.h"

#include <cctype>
#include <cstdint>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "persona/csv.h"
#include "persona/error.h"

namespace persona {

using nlohmann::json;

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

const json& Require(const json& node, const char* key, const std::string& path) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw SchemaError(path + ": missing field \"" + key + "\"");
  }
  return *it;
}

std::string RequireString(const json& node, const char* key,
                          const std::string& path) {
  const json& v = Require(node, key, path);
  if (!v.is_string()) {
    throw SchemaError(path + "." + key + ": expected a string");
  }
  return v.get<std::string>();
}

const json& RequireArray(const json& node, const char* key,
                         const std::string& path) {
  const json& v = Require(node, key, path);
  if (!v.is_array()) {
    throw SchemaError(path + "." + key + ": expected an array");
  }
  return v;
}

std::string ExtractSpeaker(const json& utt, const std::string& path) {
  const json& v = Require(utt, "speaker", path);
  if (v.is_string()) return std::string(Trim(v.get_ref<const std::string&>()));
  if (v.is_array()) {
    // Multi-speaker turn: attribute to the first listed speaker.
    for (const json& name : v) {
      if (!name.is_string()) {
        throw SchemaError(path + ".speaker: expected strings in speaker list");
      }
    }
    if (v.empty()) return {};
    return std::string(Trim(v.front().get_ref<const std::string&>()));
  }
  throw SchemaError(path + ".speaker: expected a string or list of strings");
}

}  // namespace

std::string_view TrimRight(std::string_view s) {
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view Trim(std::string_view s) {
  s = TrimRight(s);
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  return s;
}

bool IsValidUtf8(std::string_view bytes) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::vector<Scene> ParseTranscript(std::string_view document,
                                   const TranscriptOptions& options) {
  if (!IsValidUtf8(document)) {
    throw EncodingError("transcript: document is not valid UTF-8");
  }
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("transcript: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("$: expected an object");

  std::vector<Scene> scenes;
  const json& episodes = RequireArray(root, "episodes", "$");
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const std::string epath = "episodes[" + std::to_string(e) + "]";
    const json& episode = episodes[e];
    if (!episode.is_object()) throw SchemaError(epath + ": expected an object");
    const std::string episode_id = RequireString(episode, "episode_id", epath);
    const json& scene_nodes = RequireArray(episode, "scenes", epath);
    std::set<std::string> seen_ids;
    for (std::size_t s = 0; s < scene_nodes.size(); ++s) {
      const std::string spath = epath + ".scenes[" + std::to_string(s) + "]";
      const json& node = scene_nodes[s];
      if (!node.is_object()) throw SchemaError(spath + ": expected an object");
      Scene scene;
      scene.episode_id = episode_id;
      scene.scene_id = RequireString(node, "scene_id", spath);
      if (!seen_ids.insert(scene.scene_id).second) {
        throw SchemaError(spath + ".scene_id: duplicate scene id \"" +
                          scene.scene_id + "\" in episode \"" + episode_id +
                          "\"");
      }
      const json& utts = RequireArray(node, "utterances", spath);
      for (std::size_t u = 0; u < utts.size(); ++u) {
        const std::string upath = spath + ".utterances[" + std::to_string(u) + "]";
        const json& un = utts[u];
        if (!un.is_object()) throw SchemaError(upath + ": expected an object");
        std::string speaker = ExtractSpeaker(un, upath);
        std::string text = RequireString(un, "text", upath);
        if (speaker.empty()) {
          if (options.drop_empty_speaker) continue;
          throw SchemaError(upath + ".speaker: empty speaker");
        }
        Utterance utt;
        utt.speaker = std::move(speaker);
        utt.text = std::string(TrimRight(text));
        utt.index = scene.utterances.size();
        scene.utterances.push_back(std::move(utt));
      }
      scenes.push_back(std::move(scene));
    }
  }
  return scenes;
}

std::string SerializeTranscript(const std::vector<Scene>& scenes) {
  json episodes = json::array();
  for (const Scene& scene : scenes) {
    if (episodes.empty() || episodes.back()["episode_id"] != scene.episode_id) {
      episodes.push_back({{"episode_id", scene.episode_id},
                          {"scenes", json::array()}});
    }
    json utts = json::array();
    for (const Utterance& u : scene.utterances) {
      utts.push_back({{"speaker", u.speaker}, {"text", u.text}});
    }
    episodes.back()["scenes"].push_back(
        {{"scene_id", scene.scene_id}, {"utterances", std::move(utts)}});
  }
  return json{{"episodes", std::move(episodes)}}.dump(2) + "\n";
}

std::vector<EssayDocument> ParseEssays(std::string_view document) {
  if (!IsValidUtf8(document)) {
    throw EncodingError("essays: document is not valid UTF-8");
  }
  // Tolerate a UTF-8 byte order mark.
  if (document.substr(0, 3) == "\xEF\xBB\xBF") document.remove_prefix(3);

  std::vector<csv::Row> rows = csv::Parse(document);
  if (rows.empty()) throw SchemaError("essays: missing header row");

  const csv::Row& header = rows.front();
  int id_col = -1;
  int text_col = -1;
  PerTrait<int> trait_cols;
  trait_cols.fill(-1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name(Trim(header[c]));
    std::string lower;
    for (char ch : name) lower.push_back(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "id" || lower == "#authid" || lower == "authid") {
      id_col = static_cast<int>(c);
    } else if (lower == "text") {
      text_col = static_cast<int>(c);
    } else if (auto t = ParseTrait(name)) {
      trait_cols[Index(*t)] = static_cast<int>(c);
    }
  }
  if (id_col < 0) throw SchemaError("essays: missing column \"id\"");
  if (text_col < 0) throw SchemaError("essays: missing column \"text\"");
  for (Trait t : kAllTraits) {
    if (trait_cols[Index(t)] < 0) {
      throw SchemaError("essays: missing column \"" + std::string(TraitName(t)) +
                        "\"");
    }
  }

  std::vector<EssayDocument> docs;
  docs.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() == 1 && Trim(row[0]).empty()) continue;  // blank line
    if (row.size() != header.size()) {
      throw SchemaError("essays: row " + std::to_string(r) + " has " +
                        std::to_string(row.size()) + " fields, header has " +
                        std::to_string(header.size()));
    }
    EssayDocument doc;
    doc.doc_id = std::string(Trim(row[id_col]));
    doc.text = row[text_col];
    for (Trait t : kAllTraits) {
      std::string token(Trim(row[trait_cols[Index(t)]]));
      for (char& ch : token) ch = std::tolower(static_cast<unsigned char>(ch));
      if (token == "y" || token == "1" || token == "true") {
        doc.labels[Index(t)] = 1;
      } else if (token == "n" || token == "0" || token == "false") {
        doc.labels[Index(t)] = 0;
      } else {
        throw LabelError("essays: row " + std::to_string(r) + " column " +
                         std::string(TraitName(t)) + ": unrecognized label \"" +
                         row[trait_cols[Index(t)]] + "\"");
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace persona
