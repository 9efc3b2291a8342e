#pragma once

#include <cstdint>
#include <random>

namespace rcsim {

// splitmix64 finalizer. Cheap, well-mixed, and good enough to derive
// independent seed streams from a single master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seed splitting rule for sweeps: seed_i = master XOR mix(point, subframe).
// This is part of the reproducibility contract; results for a given
// (config, master seed) are independent of execution order.
constexpr std::uint64_t subframe_seed(std::uint64_t master, std::uint64_t point,
                                      std::uint64_t subframe) {
    return master ^ splitmix64((point << 32) ^ subframe);
}

// Derives the seed of a named sub-stream (channel taps, noise, ESN init, ...)
// from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + 0x9E3779B97F4A7C15ull * (stream + 1));
}

using Rng = std::mt19937_64;

}  // namespace rcsim
