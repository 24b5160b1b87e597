#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace rowaction {

/// Seeded generator: std::mt19937_64 underneath (its output sequence is fixed by
/// the standard), with uniforms and normals derived here so streams agree
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t nextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1], safe to pass to log().
  double uniformOpenLow() { return 1.0 - uniform(); }
  // Uniform integer in [0, bound), rejection-sampled, bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal by Box–Muller; the second variate of each pair is cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // `count` distinct indices from [0, population) by partial Fisher–Yates, in
  // draw order.
  std::vector<std::size_t> sampleWithoutReplacement(std::size_t population, std::size_t count);

 private:
  std::mt19937_64 engine_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace rowaction
