#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace textdet {

// Uniform draw in [lo, hi) from the top 53 bits of the generator output.
// Used instead of std::uniform_real_distribution so streams are identical
// across standard library implementations.
inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
  const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Unbiased integer draw in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

template <class T>
void shuffle_inplace(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace textdet
