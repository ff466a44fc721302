#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace simspace {

/// Deterministic random number generator (xoshiro256** seeded through
/// SplitMix64). Output is identical on every platform: the distributions
/// below are implemented here instead of relying on <random>, whose
/// distribution algorithms are implementation-defined.
///
/// Independent streams are derived from a root seed plus a stream key, so
/// work items (MDS restarts, augmentation replicates) can run in any order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  static Rng stream(std::uint64_t seed, std::uint64_t index) noexcept;
  static Rng stream(std::uint64_t seed, std::string_view key, std::uint64_t index) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;

  /// Standard normal deviate (Box-Muller, no cached second value).
  double normal() noexcept;

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// FNV-1a, used to fold string keys into stream seeds.
std::uint64_t hash_string(std::string_view text) noexcept;

}  // namespace simspace
