#pragma once

#include <array>
#include <cstdint>

namespace polling {

// SplitMix64 (Vigna, public domain). Only used to expand seeds: one master
// seed fans out into the per-stream generator states below.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256++ (Blackman/Vigna, public domain). Small, fast, and good enough
// statistically that independent instances seeded via SplitMix64 behave as
// independent streams.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform draw strictly inside (0,1): take the top 53 bits and offset by
  // half an ulp so inverse transforms never see exactly 0 or 1.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

// Every primitive sequence of the model draws from its own stream, so
// changing one distribution (e.g. in a parameter sweep) leaves the random
// inputs of all the others untouched: common random numbers across runs.
struct StreamSet {
  std::array<Xoshiro256pp, 3> interarrival;
  std::array<Xoshiro256pp, 3> service;
  std::array<Xoshiro256pp, 4> switchover;  // legs 1->2, 2->3, 3->1, 1->3

  explicit StreamSet(std::uint64_t master_seed)
      : interarrival{derive(master_seed, 0), derive(master_seed, 1), derive(master_seed, 2)},
        service{derive(master_seed, 3), derive(master_seed, 4), derive(master_seed, 5)},
        switchover{derive(master_seed, 6), derive(master_seed, 7), derive(master_seed, 8),
                   derive(master_seed, 9)} {}

  static Xoshiro256pp derive(std::uint64_t master, int stream_index) {
    SplitMix64 sm(master);
    std::uint64_t s = 0;
    for (int i = 0; i <= stream_index; ++i) s = sm.next();
    return Xoshiro256pp(s);
  }
};

}  // namespace polling
