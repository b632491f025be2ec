#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace acmca {

/// Counter-based pseudo-random stream (splitmix64). One stream is derived per
/// (master_seed, trial, row, col) or per (master_seed, trial, purpose, ...)
/// key path, so parallel trials replay bit-identically regardless of
/// scheduling. State is 8 bytes, cheap enough to keep one per crossbar cell.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two draws, no cached second
  /// value so the stream position is a pure function of the call count.
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Folds a key path (master seed, trial, purpose tags, coordinates...) into a
/// stream seed. Order-sensitive: {a, b} and {b, a} give unrelated streams.
inline std::uint64_t stream_seed(std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = 0x27d4eb2f165667c5ULL;
  for (std::uint64_t part : path) {
    h = detail::mix64(h ^ (part + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

inline RngStream make_stream(std::initializer_list<std::uint64_t> path) {
  return RngStream(stream_seed(path));
}

/// Purpose tags for deriving independent substreams of one trial.
namespace stream_tag {
inline constexpr std::uint64_t kCell = 0x01;       // per-cell programming pulses
inline constexpr std::uint64_t kSignal = 0x02;     // sparse frame generation
inline constexpr std::uint64_t kNoise = 0x03;      // measurement noise
inline constexpr std::uint64_t kTargets = 0x04;    // measurement-matrix base uniforms
inline constexpr std::uint64_t kRip = 0x05;        // RIP support sampling
inline constexpr std::uint64_t kTranspose = 0x06;  // transposed-array cell streams
}  // namespace stream_tag

}  // namespace acmca
