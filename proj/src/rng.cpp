#include "depthforge/rng.hpp"

#include <cmath>

namespace depthforge {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= static_cast<std::uint64_t>(c);
    state *= 1099511628211ull;
  }
  return state;
}

std::uint64_t mix_seed(std::uint64_t base, std::string_view tag) {
  char raw[8];
  for (int i = 0; i < 8; ++i) {
    raw[i] = static_cast<char>((base >> (8 * i)) & 0xff);
  }
  std::uint64_t h = fnv1a64(std::string_view(raw, 8));
  return fnv1a64(tag, h);
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling over the largest multiple of n below 2^64.
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

double gaussian(std::mt19937_64& rng, double stddev) {
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  while (u1 <= 0.0) u1 = uniform_unit(rng);
  return stddev * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace depthforge
