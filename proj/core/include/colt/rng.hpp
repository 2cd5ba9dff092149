#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "colt/types.hpp"

namespace colt {

// splitmix64 step; used to derive independent sub-seeds from one base seed
// so that e.g. each tree node draws from its own stream.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return mix_seed(base ^ mix_seed(tag));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag1, std::uint64_t tag2) {
    return mix_seed(derive_seed(base, tag1) ^ mix_seed(tag2 + 0x7f4a7c15ULL));
}

// Bounded draw without std::uniform_int_distribution, whose output is
// implementation-defined; results must be reproducible from the seed alone.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

// k distinct values from [0, n) via partial Fisher-Yates, deterministic per rng state.
inline std::vector<std::uint32_t> sample_without_replacement(std::mt19937_64& rng,
                                                             std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t j = i + static_cast<std::uint32_t>(bounded(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

// k distinct elements drawn from an explicit pool (pool order matters for determinism).
inline std::vector<Vertex> sample_from_pool(std::mt19937_64& rng,
                                            const std::vector<Vertex>& pool, std::uint32_t k) {
    std::vector<std::uint32_t> idx =
        sample_without_replacement(rng, static_cast<std::uint32_t>(pool.size()), k);
    std::vector<Vertex> out(k);
    for (std::uint32_t i = 0; i < k; ++i) out[i] = pool[idx[i]];
    return out;
}

}  // namespace colt
