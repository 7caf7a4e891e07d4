#include "persona/formats.h"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "persona/error.h"

namespace persona {

namespace {

bool IsWordByte(char ch) {
  const auto c = static_cast<unsigned char>(ch);
  return c >= 0x80 || std::isalnum(c) || c == '_';
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

// Single left-to-right pass so inserted marks are never rescanned.
std::string ReplaceNames(
    std::string_view text,
    const std::vector<std::pair<std::string, std::string>>& longest_first) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool at_boundary = i == 0 || !IsWordByte(text[i - 1]);
    bool matched = false;
    if (at_boundary) {
      for (const auto& [name, mark] : longest_first) {
        const std::size_t len = name.size();
        if (i + len > text.size()) continue;
        if (i + len < text.size() && IsWordByte(text[i + len])) continue;
        if (!EqualsIgnoreCase(text.substr(i, len), name)) continue;
        out += mark;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(text[i++]);
  }
  return out;
}

std::string JoinSpace(const std::vector<const std::string*>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += *parts[i];
  }
  return out;
}

FormattedItem MakeItem(const AnonymizedSubScene& a, Format f, std::string text) {
  FormattedItem item;
  item.subscene_id = a.source_id;
  item.format = f;
  item.text = std::move(text);
  return item;
}

}  // namespace

std::string_view FormatName(Format f) {
  switch (f) {
    case Format::kSingle:
      return "S";
    case Format::kSingleContext:
      return "S+C";
    case Format::kFull:
      return "F";
  }
  return "?";
}

std::optional<Format> ParseFormat(std::string_view name) {
  if (EqualsIgnoreCase(name, "S")) return Format::kSingle;
  if (EqualsIgnoreCase(name, "S+C") || EqualsIgnoreCase(name, "SC")) {
    return Format::kSingleContext;
  }
  if (EqualsIgnoreCase(name, "F")) return Format::kFull;
  return std::nullopt;
}

std::string SpeakerMark(std::size_t i) { return "speaker" + std::to_string(i); }

bool IsSpeakerMark(std::string_view token) {
  constexpr std::string_view kPrefix = "speaker";
  if (token.size() <= kPrefix.size() || token.substr(0, kPrefix.size()) != kPrefix) {
    return false;
  }
  return std::all_of(token.begin() + kPrefix.size(), token.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

AnonymizedSubScene Anonymize(const msf::SubScene& subscene,
                             const AnonymizeOptions& options) {
  AnonymizedSubScene out;
  out.source_id = subscene.Id();

  std::unordered_map<std::string, std::string> mark_of;
  auto assign = [&](const std::string& name) {
    if (mark_of.count(name)) return;
    std::string mark = SpeakerMark(out.mapping.size());
    mark_of.emplace(name, mark);
    out.mapping.emplace_back(name, std::move(mark));
  };
  assign(subscene.main_speaker);
  for (const Utterance& u : subscene.utterances) assign(u.speaker);

  auto by_length = out.mapping;
  std::stable_sort(by_length.begin(), by_length.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });

  out.subscene = subscene;
  out.subscene.main_speaker = mark_of.at(subscene.main_speaker);
  for (Utterance& u : out.subscene.utterances) {
    u.speaker = mark_of.at(u.speaker);
    if (options.replace_in_text) u.text = ReplaceNames(u.text, by_length);
  }
  return out;
}

FormattedItem ToSingle(const AnonymizedSubScene& a) {
  std::vector<const std::string*> parts;
  for (const Utterance& u : a.subscene.utterances) {
    if (u.speaker == a.subscene.main_speaker) parts.push_back(&u.text);
  }
  if (parts.empty()) {
    throw NoMainSpeakerUtterancesError("sub-scene " + a.source_id +
                                       ": main speaker has no utterances");
  }
  return MakeItem(a, Format::kSingle, JoinSpace(parts));
}

FormattedItem ToSingleContext(const AnonymizedSubScene& a) {
  FormattedItem item = ToSingle(a);
  item.format = Format::kSingleContext;
  std::vector<const std::string*> context;
  for (const Utterance& u : a.subscene.utterances) {
    if (u.speaker != a.subscene.main_speaker) context.push_back(&u.text);
  }
  item.text += ' ';
  item.text += kContextSeparator;
  if (!context.empty()) {
    item.text += ' ';
    item.text += JoinSpace(context);
  }
  return item;
}

FormattedItem ToFull(const AnonymizedSubScene& a) {
  std::string text;
  for (std::size_t i = 0; i < a.subscene.utterances.size(); ++i) {
    const Utterance& u = a.subscene.utterances[i];
    if (i) text.push_back('\n');
    text += u.speaker;
    text += ": ";
    text += u.text;
  }
  return MakeItem(a, Format::kFull, std::move(text));
}

FormattedItem ToFormat(const AnonymizedSubScene& a, Format format) {
  switch (format) {
    case Format::kSingle:
      return ToSingle(a);
    case Format::kSingleContext:
      return ToSingleContext(a);
    case Format::kFull:
      return ToFull(a);
  }
  throw ConfigError("unknown format");
}

}  // namespace persona
