#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace aqnn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective mix of 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over a stream label, so derived seeds are keyed by readable names.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hashes a label plus optional indices into the root seed to get an independent stream seed.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                    std::uint64_t i = 0, std::uint64_t j = 0) noexcept {
    std::uint64_t h = mix64(root ^ label_hash(label));
    h = mix64(h ^ mix64(i + 0x632be59bd9b4e019ULL));
    return mix64(h ^ mix64(j + 0x8cb92ba72f3d8dd7ULL));
}

/// Adds sigma * N(0, 1) to every coordinate using a stream private to `stream_seed`.
/// sigma == 0 leaves `v` bit-identical.
void add_isotropic_noise(std::span<double> v, double sigma, std::uint64_t stream_seed);

}  // namespace aqnn
