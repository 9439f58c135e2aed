#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace depthforge {

// 64-bit FNV-1a over arbitrary bytes. Used to derive per-image RNG streams
// from (base seed, image id) so datasets reproduce across machines.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t state = 14695981039346656037ull);

// Combines a numeric seed with a tag string into one stream seed.
std::uint64_t mix_seed(std::uint64_t base, std::string_view tag);

// Unbiased integer in [0, n), n >= 1. std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries, so every draw that must
// reproduce exactly goes through these helpers instead.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& rng);

double uniform_range(std::mt19937_64& rng, double lo, double hi);

// One N(0, stddev) sample via Box-Muller (two uniforms consumed per call).
double gaussian(std::mt19937_64& rng, double stddev);

}  // namespace depthforge
