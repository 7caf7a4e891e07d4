#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace persona {

// splitmix64: identical sequences on every platform for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }

 private:
  std::uint64_t state_;
};

// Fisher-Yates from the back: for i = n-1 .. 1, swap v[i] with v[Next() % (i+1)].
template <typename T>
void Shuffle(std::span<T> v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.Next() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace persona
