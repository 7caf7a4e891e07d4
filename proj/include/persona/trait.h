#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace persona {

// Big Five traits in canonical column order.
enum class Trait { kAGR = 0, kCON, kEXT, kOPN, kNEU };

inline constexpr std::size_t kNumTraits = 5;

inline constexpr std::array<Trait, kNumTraits> kAllTraits = {
    Trait::kAGR, Trait::kCON, Trait::kEXT, Trait::kOPN, Trait::kNEU};

std::string_view TraitName(Trait t);

// Accepts the canonical upper-case names and the "cAGR"-style column names
// of the original essays release; case-insensitive.
std::optional<Trait> ParseTrait(std::string_view name);

inline constexpr std::size_t Index(Trait t) {
  return static_cast<std::size_t>(t);
}

// One value per trait, indexed by Trait.
template <typename T>
using PerTrait = std::array<T, kNumTraits>;

}  // namespace persona
