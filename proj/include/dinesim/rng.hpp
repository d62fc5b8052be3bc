#pragma once

#include <cstdint>
#include <random>

namespace dinesim {

// Deterministic variate source. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the transforms below are our own so
// streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential variate parameterized by its mean (rate = 1 / mean).
  // Strictly positive.
  double exponential(double mean);

  // Uniform integer on [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace dinesim
