#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace persona {

// Lower-cases ASCII letters and splits on ASCII whitespace and punctuation.
// Bytes >= 0x80 are kept inside tokens so UTF-8 sequences stay intact.
std::vector<std::string> Tokenize(std::string_view text);

// Token -> index map. Index 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Tokens occurring at least min_freq times across `documents`, indexed in
  // order of first occurrence.
  static Vocabulary Build(std::span<const std::vector<std::string>> documents,
                          std::size_t min_freq);

  // Appends a token if absent; returns its index.
  std::size_t Add(const std::string& token);
  std::size_t Lookup(const std::string& token) const;
  std::vector<std::size_t> Encode(std::span<const std::string> tokens) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace persona
