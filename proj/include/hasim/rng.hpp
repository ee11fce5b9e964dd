// Counter-based randomness. Every run owns an independent Philox4x32-10
// stream keyed by (master seed, scenario index, run index); within a period
// each draw has a fixed (period, slot) counter. Results are therefore
// identical for any execution order or worker count.
#pragma once

#include <cstdint>
#include <array>

#include "numeric.hpp"

namespace hasim {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint64_t M0 = 0xD2511F53ULL, M1 = 0xCD9E8D57ULL;
    const std::uint64_t p0 = M0 * ctr[0];
    const std::uint64_t p1 = M1 * ctr[2];
    const std::array<std::uint32_t, 4> out = {
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0)};
    ctr = out;
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) philox_round(ctr, key);
    return ctr;
}
}  // namespace detail

/// Fixed purposes of the per-period draws; the slot is the RNG counter, so
/// unused slots never shift later draws.
enum class DrawSlot : std::uint32_t {
    init = 0,       // initial target (period 1 only)
    theta = 1,      // environment realization
    candidate1 = 2, // first search alternative
    candidate2 = 3, // second search alternative
    bernoulli = 4,  // exploration fallback when the threshold is degenerate
    reset = 5,      // restart position after a failed feasibility check
};

/// One run's random stream. Stateless between calls: each (period, slot)
/// pair maps to one 128-bit Philox block.
class RunRng {
public:
    RunRng(std::uint64_t master_seed, std::uint32_t scenario_index, std::uint32_t run_index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = detail::splitmix64(s);
        s ^= (static_cast<std::uint64_t>(scenario_index) << 32) | 0x1ULL;
        std::uint64_t b = detail::splitmix64(s);
        s ^= (static_cast<std::uint64_t>(run_index) << 1) | 0x2ULL;
        std::uint64_t c = detail::splitmix64(s);
        key_ = {static_cast<std::uint32_t>(a ^ (b >> 32)),
                static_cast<std::uint32_t>(b ^ (c >> 32))};
        hi_ = static_cast<std::uint32_t>(c);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint32_t period, DrawSlot slot, std::uint32_t sub = 0) const {
        const auto words = detail::philox4x32(
            {period, static_cast<std::uint32_t>(slot), sub, hi_}, key_);
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(words[0]) << 21) ^
            (static_cast<std::uint64_t>(words[1]) << 11) ^ words[2];
        return static_cast<double>(bits & ((1ULL << 53) - 1)) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform_in(std::uint32_t period, DrawSlot slot, double lo, double hi,
                      std::uint32_t sub = 0) const {
        return lo + uniform(period, slot, sub) * (hi - lo);
    }

    /// N(mu, sigma) by inverse-CDF sampling; one block per draw.
    double normal(std::uint32_t period, DrawSlot slot, double mu, double sigma,
                  std::uint32_t sub = 0) const {
        double u = uniform(period, slot, sub);
        if (u <= 0.0) u = 0x1.0p-53;
        return mu + sigma * norm_ppf(u);
    }

    bool bernoulli(std::uint32_t period, DrawSlot slot, double p, std::uint32_t sub = 0) const {
        return uniform(period, slot, sub) < p;
    }

private:
    std::array<std::uint32_t, 2> key_{};
    std::uint32_t hi_ = 0;
};

}  // namespace hasim
