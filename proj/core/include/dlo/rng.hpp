#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace dlo {

/// Deterministic random source. Wraps mt19937_64 but implements the real
/// distributions itself so that streams are stable across standard libraries
/// (std::normal_distribution is implementation-defined). All experiment
/// randomness flows from one root seed through named substreams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derive an independent substream: (root, label, index) -> Rng.
  static Rng stream(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

  /// Seed that stream() would use; handy for logging and reproducing.
  static std::uint64_t stream_seed(std::uint64_t root, std::string_view label,
                                   std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [lo, hi). 53-bit mantissa draw.
  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  /// Gaussian via Box-Muller (no spare caching, so state is just the engine).
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    return mean + stddev * z;
  }

  /// Engine state as text, for checkpoint/resume.
  std::string save_state() const;
  void restore_state(const std::string& text);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used for substream seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over a label string.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace dlo
