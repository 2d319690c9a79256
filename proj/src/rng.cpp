#include "scm/rng.hpp"

#include <cmath>
#include <limits>

namespace scm {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream RngStream::derive(std::uint64_t master_seed, std::string_view label) {
  return RngStream(splitmix64(master_seed ^ fnv1a64(label)));
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  // rejection sampling removes modulo bias
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return lo + static_cast<std::int64_t>(x % span);
}

double RngStream::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  // Knuth's product method, applied in chunks so exp(-chunk) never underflows.
  constexpr double kChunk = 30.0;
  std::int64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double lambda = remaining > kChunk ? kChunk : remaining;
    remaining -= lambda;
    const double limit = std::exp(-lambda);
    double product = uniform01();
    std::int64_t k = 0;
    while (product > limit) {
      ++k;
      product *= uniform01();
    }
    total += k;
  }
  return total;
}

}  // namespace scm
