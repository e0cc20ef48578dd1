#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kxsim {

using Engine = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a; only used to turn stream labels into 64-bit salts.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Derives an independent engine for the named stream `label` (and optional
/// per-agent `index`) from the run's master seed. The derivation is fixed, so
/// enabling or disabling one feature never shifts another stream's draws.
inline Engine derive_stream(std::uint64_t master_seed, std::string_view label,
                            std::uint64_t index = 0) {
    std::uint64_t s = detail::splitmix64(master_seed);
    s = detail::splitmix64(s ^ detail::fnv1a(label));
    s = detail::splitmix64(s ^ index);
    return Engine{s};
}

/// One fair bit from the top of a raw engine word (implementation independent).
inline bool draw_bit(Engine& rng) { return (rng() >> 63) != 0; }

inline double draw_unit(Engine& rng) {
    return std::uniform_real_distribution<double>{0.0, 1.0}(rng);
}

inline std::size_t draw_index(Engine& rng, std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>{0, bound - 1}(rng);
}

}  // namespace kxsim
