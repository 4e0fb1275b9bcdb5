#ifndef FASTMAPSVM_DETAIL_SEED_HPP
#define FASTMAPSVM_DETAIL_SEED_HPP

#include <cstdint>

namespace fastmapsvm::detail {

// Splitmix64 step; derives independent sub-seeds from a master seed so that
// separately seeded stages do not share random streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace fastmapsvm::detail

#endif
