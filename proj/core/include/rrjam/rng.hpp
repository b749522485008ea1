#ifndef RRJAM_RNG_HPP
#define RRJAM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace rrjam {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** with splitmix-expanded seeding. Substreams are derived from
// (seed, stream) so that path generation is reproducible regardless of how
// work is scheduled across threads.
class Xoshiro256 {
public:
  Xoshiro256() : Xoshiro256(0, 0) {}
  Xoshiro256(uint64_t seed, uint64_t stream) {
    uint64_t sm = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    for (auto& w : s_) w = splitmix64(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard exponential via inversion; uniform() < 1 so the log is finite.
  double exponential() { return -std::log1p(-uniform()); }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

// Inverse-CDF sampler over a fixed finite distribution. Implemented by hand
// (not std::discrete_distribution) so outputs are identical across standard
// library implementations.
class CategoricalSampler {
public:
  explicit CategoricalSampler(std::span<const double> weights) {
    cumulative_.reserve(weights.size());
    double acc = 0;
    for (double w : weights) {
      acc += w;
      cumulative_.push_back(acc);
    }
    if (!cumulative_.empty()) cumulative_.back() = acc; // search never falls off the end below
    total_ = acc;
  }

  int sample(Xoshiro256& rng) const {
    const double x = rng.uniform() * total_;
    std::size_t lo = 0, hi = cumulative_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative_[mid] > x)
        hi = mid;
      else
        lo = mid + 1;
    }
    return static_cast<int>(lo);
  }

private:
  std::vector<double> cumulative_;
  double total_ = 0;
};

}  // namespace rrjam

#endif
