#pragma once

#include <cstdint>

namespace dfs {

// xoshiro256** with splitmix64 seeding. The standard library engines are
// portable but their distributions are not, so all bounded draws are
// implemented here; results are identical across platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  // Independent stream for (seed, stream_id); used for per-model sampling
  // streams so that parallel runs reproduce the sequential result.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    Rng r(0);
    std::uint64_t x = seed;
    std::uint64_t a = splitmix64(x);
    std::uint64_t b = splitmix64(x);
    std::uint64_t y = stream_id * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
    r.state_[0] = splitmix64(y) ^ a;
    r.state_[1] = splitmix64(y);
    r.state_[2] = splitmix64(y) ^ b;
    r.state_[3] = splitmix64(y);
    // All-zero state is invalid for xoshiro; seed 0/stream 0 cannot produce
    // it with the constants above, but guard anyway.
    if ((r.state_[0] | r.state_[1] | r.state_[2] | r.state_[3]) == 0)
      r.state_[3] = 1;
    return r;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace dfs
