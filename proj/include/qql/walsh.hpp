#pragma once

#include <bit>
#include <cstddef>
#include <span>

#include "qql/errors.hpp"

namespace qql {

/// In-place unnormalized Walsh-Hadamard transform:
///   out[s] = sum_f (-1)^popcount(s & f) in[f].
/// Size must be a power of two. Applying it twice multiplies by the size.
template <class T>
void walsh_hadamard(std::span<T> data) {
  const std::size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw ParameterError("Walsh-Hadamard transform needs a power-of-two length");
  }
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t base = 0; base < n; base += 2 * half) {
      for (std::size_t i = base; i < base + half; ++i) {
        const T a = data[i];
        const T b = data[i + half];
        data[i] = a + b;
        data[i + half] = a - b;
      }
    }
  }
}

}  // namespace qql
