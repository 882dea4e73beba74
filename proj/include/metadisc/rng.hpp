#pragma once

#include <cstdint>
#include <vector>

namespace metadisc {

/// SplitMix64; used to expand seeds and to derive independent stream seeds.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** with platform-independent helpers. All randomized stages use
/// this engine so that identical seeds reproduce identical artifacts
/// regardless of standard-library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    /// Derive an independent stream (e.g. one per forest tree or stratum).
    static Rng derive(uint64_t seed, uint64_t stream) {
        uint64_t sm = seed;
        uint64_t base = splitmix64(sm);
        uint64_t mix = stream + 0x9e3779b97f4a7c15ULL;
        return Rng(base ^ splitmix64(mix));
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Unbiased-enough bounded draw via 128-bit multiply (Lemire, no rejection).
    uint64_t nextBelow(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next()) * n) >> 64);
    }

    /// Uniform in [0, 1).
    double nextDouble() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * nextDouble();
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (size_t i = values.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(nextBelow(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4] = {};
};

} // namespace metadisc
