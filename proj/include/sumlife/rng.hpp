#pragma once

#include <cstdint>
#include <random>

namespace sumlife {

/// splitmix64 finalizer; used to derive independent seeds from a run seed.
std::uint64_t mix64(std::uint64_t x);

/// Derives a stream seed from (base, a, b). Adding tasks or purposes never
/// perturbs seeds that were derived earlier.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Purpose tags for derive_seed.
enum class SeedPurpose : std::uint64_t {
  kInit = 1,
  kTrain = 2,
  kGrow = 3,
  kSplit = 4,
  kDropout = 5,
};

/// Portable random source. Distributions are implemented here rather than via
/// <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sumlife
