#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scm {

/// 64-bit FNV-1a; stable across platforms, used for stream labels and config hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// A deterministic random stream. Only the engine bits of std::mt19937_64 are
/// used (its output sequence is fixed by the standard); every distribution is
/// implemented here so draws are identical on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Child stream for a named consumer. Adding a new consumer never shifts
  /// the draws of existing ones.
  static RngStream derive(std::uint64_t master_seed, std::string_view label);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1).
  double uniform01();

  /// Poisson-distributed count with the given mean.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace scm
