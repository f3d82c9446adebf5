#pragma once

#include <array>
#include <cstdint>

namespace cachesim {

// SplitMix64 (Steele, Lea, Flood). Used to expand seeds into engine state and
// to derive child stream seeds.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). Self-contained so that draws are identical
// across platforms and standard-library versions; std:: distributions are
// implementation-defined and would break byte-level reproducibility.
class RandomEngine {
public:
    using result_type = std::uint64_t;

    explicit RandomEngine(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& word : state_) word = sm.next();
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t next() {
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

    // Unbiased integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    // Exact Bernoulli(num/den); avoids any floating-point rounding of the odds.
    bool bernoulli_ratio(std::uint64_t num, std::uint64_t den) {
        return uniform_below(den) < num;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

// Names one reproducible random stream. Identical (master_seed, stream_id)
// pairs reproduce identical draws regardless of evaluation order, which makes
// parallel and serial experiment schedules bit-identical.
struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    // Combines a seed and a stream label into a fresh 64-bit seed by running
    // both through SplitMix64 rounds (hash-combine style).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t label) {
        SplitMix64 sm{seed};
        const std::uint64_t h = sm.next();
        sm.state = h ^ (label + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
        return sm.next();
    }

    // Child stream for a component (placement, demands, delivery, ...).
    RngSpec substream(std::uint64_t label) const {
        return RngSpec{mix(master_seed, stream_id), label};
    }

    RandomEngine engine() const { return RandomEngine(mix(master_seed, stream_id)); }
};

} // namespace cachesim
