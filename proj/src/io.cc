#include "persona/io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "persona/error.h"
#include "persona/transcript.h"

namespace persona::io {

using nlohmann::json;

namespace {

template <typename Fn>
auto ForEachLine(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      fn(line);
    } catch (const json::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

json ParseObject(std::string_view line) {
  json j = json::parse(line);
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  return j;
}

}  // namespace

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string SubSceneToJsonLine(const msf::SubScene& s) {
  using ojson = nlohmann::ordered_json;
  ojson utts = ojson::array();
  for (const Utterance& u : s.utterances) {
    utts.push_back({{"index", u.index}, {"speaker", u.speaker}, {"text", u.text}});
  }
  ojson j = ojson::object();
  j["subscene_id"] = s.Id();
  j["episode_id"] = s.episode_id;
  j["scene_id"] = s.scene_id;
  j["main_speaker"] = s.main_speaker;
  j["start"] = s.start;
  j["end"] = s.end;
  j["peak_position"] = s.peak_position;
  j["utterances"] = std::move(utts);
  return j.dump();
}

msf::SubScene SubSceneFromJsonLine(std::string_view line) {
  const json j = ParseObject(line);
  msf::SubScene s;
  s.episode_id = j.at("episode_id").get<std::string>();
  s.scene_id = j.at("scene_id").get<std::string>();
  s.main_speaker = j.at("main_speaker").get<std::string>();
  s.start = j.at("start").get<std::size_t>();
  s.end = j.at("end").get<std::size_t>();
  s.peak_position = j.at("peak_position").get<std::size_t>();
  for (const json& u : j.at("utterances")) {
    s.utterances.push_back({u.at("speaker").get<std::string>(),
                            u.at("text").get<std::string>(),
                            u.at("index").get<std::size_t>()});
  }
  if (s.end < s.start || s.utterances.size() != s.end - s.start + 1) {
    throw SchemaError("sub-scene span does not match its utterances");
  }
  return s;
}

std::string WriteSubScenes(const std::vector<msf::SubScene>& subscenes) {
  std::string out;
  for (const auto& s : subscenes) {
    out += SubSceneToJsonLine(s);
    out.push_back('\n');
  }
  return out;
}

std::vector<msf::SubScene> ReadSubScenes(std::string_view jsonl) {
  std::vector<msf::SubScene> out;
  ForEachLine(jsonl, [&](std::string_view line) {
    out.push_back(SubSceneFromJsonLine(line));
  });
  return out;
}

std::string ItemToJsonLine(const FormattedItem& item) {
  using ojson = nlohmann::ordered_json;
  ojson j = ojson::object();
  j["subscene_id"] = item.subscene_id;
  j["format"] = FormatName(item.format);
  j["text"] = item.text;
  if (item.labels) {
    ojson labels = ojson::object();
    for (Trait t : kAllTraits) labels[std::string(TraitName(t))] = (*item.labels)[Index(t)];
    j["labels"] = std::move(labels);
  }
  return j.dump();
}

FormattedItem ItemFromJsonLine(std::string_view line) {
  const json j = ParseObject(line);
  FormattedItem item;
  item.subscene_id = j.at("subscene_id").get<std::string>();
  const std::string fmt = j.at("format").get<std::string>();
  auto f = ParseFormat(fmt);
  if (!f) throw SchemaError("unknown format \"" + fmt + "\"");
  item.format = *f;
  item.text = j.at("text").get<std::string>();
  if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
    PerTrait<int> labels{};
    for (Trait t : kAllTraits) {
      const int v = it->at(std::string(TraitName(t))).get<int>();
      if (v != 0 && v != 1) {
        throw LabelError("label for " + std::string(TraitName(t)) + " must be 0 or 1");
      }
      labels[Index(t)] = v;
    }
    item.labels = labels;
  }
  return item;
}

std::string WriteItems(const std::vector<FormattedItem>& items) {
  std::string out;
  for (const auto& item : items) {
    out += ItemToJsonLine(item);
    out.push_back('\n');
  }
  return out;
}

std::vector<FormattedItem> ReadItems(std::string_view jsonl) {
  std::vector<FormattedItem> out;
  ForEachLine(jsonl, [&](std::string_view line) {
    out.push_back(ItemFromJsonLine(line));
  });
  return out;
}

}  // namespace persona::io
