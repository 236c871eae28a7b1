#pragma once

// Small fixed-width binomials for subset ranking (N <= 64). Exact
// arbitrary-precision counting lives in bounds.hpp.

#include <array>
#include <bit>
#include <cstdint>

#include "qql/errors.hpp"

namespace qql::detail {

inline const std::array<std::array<std::uint64_t, 65>, 65>& binomial_table() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> t{};
    for (int n = 0; n <= 64; ++n) {
      t[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        // C(64,32) < 2^63, no overflow anywhere in the table.
        t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
      }
    }
    return t;
  }();
  return table;
}

inline std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  return binomial_table()[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// sum_{i<=k} C(n, i) in 64 bits; requires the sum to fit, i.e. n <= 63 or
/// k < n.
inline std::uint64_t m_sum_u64(int n, int k) {
  if (n > 63 && k >= n) {
    throw CapacityError("m_sum exceeds 64 bits");
  }
  std::uint64_t s = 0;
  for (int i = 0; i <= k && i <= n; ++i) s += binomial_u64(n, i);
  return s;
}

/// Position of a mask among the masks of equal popcount in increasing
/// numeric order (combinatorial number system).
inline std::uint64_t colex_rank(std::uint64_t bits) {
  std::uint64_t r = 0;
  int idx = 1;
  for (std::uint64_t b = bits; b != 0; b &= b - 1, ++idx) {
    r += binomial_u64(std::countr_zero(b), idx);
  }
  return r;
}

/// Inverse of colex_rank for subsets of size m drawn from n elements.
inline std::uint64_t colex_unrank(std::uint64_t rank, int m, int n) {
  std::uint64_t bits = 0;
  int top = n - 1;
  for (int idx = m; idx >= 1; --idx) {
    while (binomial_u64(top, idx) > rank) --top;
    rank -= binomial_u64(top, idx);
    bits |= std::uint64_t{1} << top;
    --top;
  }
  return bits;
}

}  // namespace qql::detail
