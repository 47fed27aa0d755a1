#pragma once

#include <cstdint>
#include <random>

namespace spinmem {

/// Seeded random stream with a pinned algorithm: std::mt19937_64 (whose output
/// sequence is fixed by the C++ standard) with hand-written uniform and
/// Box-Muller transforms, since the standard distributions are
/// implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal deviate.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Sub-seed for work item `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace spinmem
