#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "persona/trait.h"

namespace persona {

struct Utterance {
  std::string speaker;
  std::string text;
  std::size_t index = 0;  // position within the scene

  bool operator==(const Utterance&) const = default;
};

struct Scene {
  std::string episode_id;
  std::string scene_id;
  std::vector<Utterance> utterances;

  bool operator==(const Scene&) const = default;
};

struct EssayDocument {
  std::string doc_id;
  std::string text;
  PerTrait<int> labels{};

  bool operator==(const EssayDocument&) const = default;
};

struct TranscriptOptions {
  // Lines whose speaker is empty after trimming (stage directions, scene
  // notes) are dropped instead of raising SchemaError.
  bool drop_empty_speaker = false;
};

// Parses the transcript document
//   {"episodes": [{"episode_id", "scenes": [{"scene_id",
//     "utterances": [{"speaker", "text"}]}]}]}
// A speaker given as a list of names is attributed to the first name.
// Utterance text keeps its bytes except for trailing whitespace.
//
// Throws EncodingError for non-UTF-8 input and SchemaError (naming the JSON
// path of the offending node) for structural problems.
std::vector<Scene> ParseTranscript(std::string_view document,
                                   const TranscriptOptions& options = {});

// Inverse of ParseTranscript for already-canonical scenes. Consecutive scenes
// with the same episode_id are grouped under one episode.
std::string SerializeTranscript(const std::vector<Scene>& scenes);

// Parses a comma-delimited essays table. Required columns (any order): an id
// column ("id" or "#AUTHID"), a text column ("text"), and the five trait
// columns ("AGR".."NEU" or "cAGR".."cNEU"). Label tokens y/1 map to 1 and n/0
// to 0.
//
// Throws SchemaError on a missing column or ragged row, LabelError on an
// unrecognized label token, EncodingError for non-UTF-8 input.
std::vector<EssayDocument> ParseEssays(std::string_view document);

bool IsValidUtf8(std::string_view bytes);

std::string_view TrimRight(std::string_view s);
std::string_view Trim(std::string_view s);

}  // namespace persona
