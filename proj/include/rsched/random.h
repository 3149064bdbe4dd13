#pragma once

#include <cstdint>
#include <random>

namespace rsched {

// What a random stream is used for. Part of the stream key, so streams for
// different purposes never overlap even with equal master seed and index.
enum class StreamTag : std::uint64_t {
  kGenerator = 1,
  kRollout = 2,
  kStability = 3,
  kExperimentCell = 4,
  kFixture = 5,
};

// Mixes (master seed, tag, index) into a 64-bit stream seed (splitmix64
// finalizer applied per component).
std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index);

// Random stream backed by mt19937_64. The conversions to doubles and bounded
// integers are spelled out here rather than delegated to <random>
// distributions, whose output is not specified bit-for-bit by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, StreamTag tag, std::uint64_t index) {
    return Rng(derive_seed(master, tag, index));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rsched
