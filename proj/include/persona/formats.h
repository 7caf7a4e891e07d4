#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persona/msf.h"
#include "persona/trait.h"

namespace persona {

enum class Format { kSingle, kSingleContext, kFull };

// "S", "S+C", "F"
std::string_view FormatName(Format f);
// Accepts "S", "S+C", "SC", "F" (case-insensitive).
std::optional<Format> ParseFormat(std::string_view name);

inline constexpr std::string_view kContextSeparator = "<ctx>";

// Speaker mark for the i-th anonymized speaker, e.g. "speaker0".
std::string SpeakerMark(std::size_t i);
bool IsSpeakerMark(std::string_view token);

struct AnonymizeOptions {
  // Replace mentions of any speaker's name inside utterance text with the
  // speaker's mark (case-insensitive, whole-token match).
  bool replace_in_text = true;
};

struct AnonymizedSubScene {
  std::string source_id;  // Id() of the sub-scene before renaming
  msf::SubScene subscene;
  std::vector<std::pair<std::string, std::string>> mapping;  // name -> mark
};

// Renames the main speaker to speaker0 and the others to speaker1,
// speaker2, ... by order of first utterance.
AnonymizedSubScene Anonymize(const msf::SubScene& subscene,
                             const AnonymizeOptions& options = {});

struct FormattedItem {
  std::string subscene_id;
  Format format = Format::kSingle;
  std::string text;
  std::optional<PerTrait<int>> labels;

  bool operator==(const FormattedItem&) const = default;
};

// Main speaker's utterances joined by single spaces. Throws
// NoMainSpeakerUtterancesError when the main speaker has no lines.
FormattedItem ToSingle(const AnonymizedSubScene& a);

// ToSingle text, then " <ctx>", then the other speakers' utterances in
// original order, space-joined.
FormattedItem ToSingleContext(const AnonymizedSubScene& a);

// "<mark>: <text>" per utterance, newline-joined.
FormattedItem ToFull(const AnonymizedSubScene& a);

FormattedItem ToFormat(const AnonymizedSubScene& a, Format format);

}  // namespace persona
