#pragma once

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <vector>

namespace cclt {

// Counter-derived substreams on top of xoshiro256++. A (seed, stream) pair
// deterministically fixes the whole sequence, so merges over a fixed block
// order are independent of the worker count.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) { reseed(seed, stream); }

    void reseed(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() {
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

    // uniform on [0,1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift rejection-free variant is fine here; bias < 2^-64
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // standard normal via polar Box-Muller (deterministic, no spare caching)
    double normal() {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    // choose m distinct indices out of n (partial Fisher-Yates), results unsorted
    void sample_subset(std::size_t n, std::size_t m, std::vector<std::uint32_t>& out);

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    std::vector<std::uint32_t> scratch_;
};

std::uint64_t splitmix64(std::uint64_t& x);

} // namespace cclt
