#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fodgmm {

/// Philox4x32-10 counter-based block function.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// SplitMix64 finalizer; used to spread user seeds over the key space.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent random stream addressed by (seed, stream, substream). Streams
/// never overlap: the seed selects the Philox key and (stream, substream)
/// occupy the upper counter words, so results do not depend on which thread
/// consumes which stream.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  Philox4x32::Counter counter_{};
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fodgmm
