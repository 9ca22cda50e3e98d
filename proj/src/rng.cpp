#include "scenegen/rng.hpp"

#include <cmath>

namespace scenegen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr double kTwoPiLocal = 6.283185307179586476925286766559;

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RandomStream::next_u64() { return engine_(); }

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RandomStream::normal() {
  // 1 - u keeps the argument of log strictly positive.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPiLocal * u2);
}

double RandomStream::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

int RandomStream::uniform_int(int n) {
  const auto wide = static_cast<unsigned __int128>(next_u64()) *
                    static_cast<unsigned __int128>(n);
  return static_cast<int>(wide >> 64);
}

std::uint64_t RandomStream::derive_seed(std::uint64_t base,
                                        std::string_view key) {
  return splitmix64(base ^ fnv1a64(key));
}

RandomStream RandomStream::substream(std::string_view key) const {
  return RandomStream(derive_seed(seed_, key));
}

}  // namespace scenegen
