#pragma once

#include <cstdint>

namespace selinf {

double normal_quantile(double p);  // gauss.hpp owns the definition

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named sub-stream tags so every consumer of randomness derives its stream
/// from (seed, stream, index) the same way regardless of thread count.
namespace stream {
inline constexpr std::uint64_t kDesign = 0x10;
inline constexpr std::uint64_t kLambda = 0x20;
inline constexpr std::uint64_t kSplit = 0x30;
inline constexpr std::uint64_t kReplication = 0x40;
}  // namespace stream

/// xoshiro256++ with splitmix64 seeding. Self-contained so that draws are
/// bit-identical across standard libraries, runs, and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0,
               std::uint64_t index = 0) {
    std::uint64_t z = seed;
    z = splitmix64(z ^ splitmix64(stream));
    z = splitmix64(z ^ splitmix64(index));
    for (auto& w : state_) {
      z = splitmix64(z);
      w = z;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on (0, 1); never returns exactly 0 or 1.
  double uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  /// Standard normal via inverse-CDF transform.
  double normal() { return normal_quantile(uniform()); }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace selinf
