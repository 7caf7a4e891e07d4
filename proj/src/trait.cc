#include "persona/trait.h"

#include <cctype>
#include <string>

namespace persona {

std::string_view TraitName(Trait t) {
  static constexpr std::array<std::string_view, kNumTraits> kNames = {
      "AGR", "CON", "EXT", "OPN", "NEU"};
  return kNames[Index(t)];
}

std::optional<Trait> ParseTrait(std::string_view name) {
  std::string upper;
  for (char c : name) upper.push_back(std::toupper(static_cast<unsigned char>(c)));
  if (upper.size() == 4 && upper[0] == 'C') upper.erase(0, 1);
  for (Trait t : kAllTraits) {
    if (upper == TraitName(t)) return t;
  }
  return std::nullopt;
}

}  // namespace persona
