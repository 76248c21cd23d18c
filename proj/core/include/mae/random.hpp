#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mae {

/// Seeded generator with distributions implemented here rather than through
/// <random>'s distribution classes, whose output is implementation-defined.
/// Transcripts are therefore reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for one training step of a run.
  static Rng for_step(std::uint64_t run_seed, int step);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01();
  /// Uniform in [0, n); n must be positive.
  std::size_t index(std::size_t n);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mae
