#pragma once

#include <cstdint>

namespace perimax {

// splitmix64 step (Vigna); used for seeding and for mixing seed words.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic combination of a master seed with stream indices. Every
// replication r of grid point g runs on its own generator seeded with
// mix_seed(master, g, r), so results do not depend on execution order or
// worker count.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t z = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL + (z << 6) + (z >> 2);
    z = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL + (z << 6) + (z >> 2);
    return splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
// Cross-platform fixed output for a fixed seed, unlike the std distributions.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
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

    // Uniform double in the open interval (0,1); 53-bit resolution, zero
    // rejected so that -log(u) and Frechet quantiles stay finite.
    double next_unit() {
        for (;;) {
            const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
            if (u != 0.0) return u;
        }
    }

    // Bernoulli(p) draw from one uniform.
    bool next_bernoulli(double p) { return next_unit() < p; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace perimax
