#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scenegen {

// Deterministic random stream. Every stochastic operation in the library
// draws through this wrapper so that a fixed seed reproduces results
// bit-for-bit (mt19937_64 and the mappings below are fully specified,
// unlike std::normal_distribution and friends).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();
  double normal(double mean, double stddev);

  // Uniform integer in [0, n), n >= 1.
  int uniform_int(int n);

  std::uint64_t seed() const { return seed_; }

  // Independent stream derived from this stream's seed and a label.
  // Does not consume state, so substreams are position-independent.
  RandomStream substream(std::string_view key) const;

  static std::uint64_t derive_seed(std::uint64_t base, std::string_view key);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace scenegen
