#pragma once

#include <cstdint>

namespace balpart {

// Deterministic 64-bit generator (SplitMix64).  The full algorithm is spelled
// out here so that instances and runs reproduce bit-for-bit across
// implementations and platforms:
//
//   state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
//   z <- state
//   z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
//   z <- (z XOR (z >> 27)) * 0x94D049BB133111EB    (mod 2^64)
//   output = z XOR (z >> 31)
//
// next_double() maps an output to [0,1) via (output >> 11) * 2^-53.
// uniform(a,b) = a + (b-a) * next_double().
// uniform_int(lo,hi) = lo + next() % (hi-lo+1), inclusive on both ends.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // Inclusive integer range; requires lo <= hi.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

// Derives independent child seeds from a master seed.  Child i is the first
// SplitMix64 output of state (master XOR (i+1)*0x9E3779B97F4A7C15).
inline std::uint64_t seed_split(std::uint64_t master, std::uint64_t index) {
    SplitMix64 g(master ^ ((index + 1) * 0x9E3779B97F4A7C15ULL));
    return g.next();
}

}  // namespace balpart
