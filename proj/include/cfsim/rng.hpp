#ifndef CFSIM_RNG_HPP
#define CFSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace cfsim {

// SplitMix64 finalizer. Good avalanche, cheap, and stable across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent substream seed from a master seed and up to three
// labels. Every component that draws randomness gets its own substream so
// generation order never affects output.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t z = mix64(master);
    z = mix64(z ^ mix64(a));
    z = mix64(z ^ mix64(b));
    z = mix64(z ^ mix64(c));
    return z;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Substream labels. Disjoint constants keep unrelated draws uncorrelated.
namespace rng_label {
inline constexpr std::uint64_t deployment = 0x01;
inline constexpr std::uint64_t channel = 0x02;
inline constexpr std::uint64_t ao_individual = 0x03;
inline constexpr std::uint64_t actor_init = 0x04;
inline constexpr std::uint64_t critic_init = 0x05;
inline constexpr std::uint64_t explore = 0x06;
inline constexpr std::uint64_t replay_sample = 0x07;
inline constexpr std::uint64_t episode_reset = 0x08;
inline constexpr std::uint64_t tuner = 0x09;
inline constexpr std::uint64_t sweep = 0x0a;
inline constexpr std::uint64_t hybrid_inner = 0x0b;
}  // namespace rng_label

}  // namespace cfsim

#endif  // CFSIM_RNG_HPP
