#pragma once

#include <cstdint>
#include <string_view>

namespace kgsmile {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept { return mix64(a ^ mix64(b)); }

/// Stateless stream: value i depends only on (key, i), so draws can be taken
/// in any order or from any thread.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept { return combine(key_, counter); }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound); bound must be > 0.
  constexpr std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const noexcept {
    return static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(bound));
  }

  constexpr CounterStream substream(std::uint64_t id) const noexcept { return CounterStream(combine(key_, ~id)); }

 private:
  std::uint64_t key_;
};

}  // namespace kgsmile
