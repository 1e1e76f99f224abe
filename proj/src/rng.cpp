#include "cclt/rng.hpp"

#include <numeric>

namespace cclt {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void Rng::reseed(std::uint64_t seed, std::uint64_t stream) {
    // fold the stream id into the seed, then expand through splitmix64 so
    // nearby (seed, stream) pairs land in unrelated states
    std::uint64_t x = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    for (auto& s : s_) s = splitmix64(x);
    // all-zero state is invalid for xoshiro
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

void Rng::sample_subset(std::size_t n, std::size_t m, std::vector<std::uint32_t>& out) {
    scratch_.resize(n);
    std::iota(scratch_.begin(), scratch_.end(), 0u);
    out.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(scratch_[i], scratch_[j]);
        out[i] = scratch_[i];
    }
}

} // namespace cclt
