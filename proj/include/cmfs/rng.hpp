#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cmfs {

// mt19937's output sequence is pinned by the standard, but the library
// distributions and std::shuffle are not. Splits must be byte-identical
// across toolchains, so the bounded draw and the shuffle are spelled out here.

/// Uniform draw from [0, bound) via rejection on raw 32-bit outputs.
inline std::uint32_t bounded_uint(std::mt19937& gen, std::uint32_t bound) {
  if (bound <= 1) return 0;
  const std::uint32_t limit = UINT32_MAX - UINT32_MAX % bound;
  std::uint32_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % bound;
}

/// Fisher-Yates shuffle with bounded_uint draws.
template <typename T>
void shuffle_in_place(std::vector<T>& values, std::mt19937& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::uint32_t j = bounded_uint(gen, static_cast<std::uint32_t>(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace cmfs
