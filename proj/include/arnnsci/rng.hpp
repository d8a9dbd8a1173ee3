#pragma once

// Counter-based random streams. Every stochastic step derives its own
// generator from (run seed, label, indices), so results never depend on
// how work is split between threads.

#include <cstdint>
#include <limits>
#include <string_view>

namespace arnnsci {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t first,
                                                  Rest... rest) noexcept {
  if constexpr (sizeof...(rest) == 0)
    return hash_combine(seed, first);
  else
    return derive_seed(hash_combine(seed, first), static_cast<std::uint64_t>(rest)...);
}

/// FNV-1a of a stream label, e.g. "train" or "sample".
[[nodiscard]] constexpr std::uint64_t label_hash(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Named sub-stream: derive_stream(seed, "sample", iteration, probe).
template <typename... Idx>
[[nodiscard]] constexpr std::uint64_t derive_stream(std::uint64_t seed, std::string_view label,
                                                    Idx... idx) noexcept {
  if constexpr (sizeof...(idx) == 0)
    return hash_combine(seed, label_hash(label));
  else
    return derive_seed(hash_combine(seed, label_hash(label)), static_cast<std::uint64_t>(idx)...);
}

/// SplitMix64 as a UniformRandomBitGenerator; tiny state, cheap to construct per prefix.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform double in [0, 1).
  constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace arnnsci
