#include "persona/text.h"

#include <cctype>

namespace persona {

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && (std::isspace(c) || std::ispunct(c) || std::iscntrl(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary::Vocabulary() { Add(std::string(kUnkToken)); }

Vocabulary Vocabulary::Build(std::span<const std::vector<std::string>> documents,
                             std::size_t min_freq) {
  std::unordered_map<std::string, std::size_t> freq;
  std::vector<const std::string*> order;
  for (const auto& doc : documents) {
    for (const auto& tok : doc) {
      if (freq[tok]++ == 0) order.push_back(&tok);
    }
  }
  Vocabulary vocab;
  for (const std::string* tok : order) {
    if (freq[*tok] >= min_freq && *tok != kUnkToken) vocab.Add(*tok);
  }
  return vocab;
}

std::size_t Vocabulary::Add(const std::string& token) {
  auto [it, inserted] = index_.try_emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::Lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::Encode(std::span<const std::string> tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Lookup(t));
  return ids;
}

}  // namespace persona
