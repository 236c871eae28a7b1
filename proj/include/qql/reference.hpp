#pragma once

// Algorithms that meet the counting bound with equality.
//
// Character distinguisher (k = 1, N = 2^n - 1): start in the uniform
// superposition over phase labels |0>..|N>; one query imprints (-1)^{a.x};
// the (N+1)-point character transform maps f_a|s> onto |a>.
//
// Uniform low-weight-subset algorithm (all 2^N functions, k queries): a
// subset register S (the workspace, W = 2^N) and a query index x. The
// initial state is uniform over |S| <= k with x = smallest element of S.
// Each V_i swaps x from the i-th to the (i+1)-th smallest element of S (0
// when S runs out), so k queries accumulate chi_S(F). V_k instead returns x
// to 0 and applies the character transform on S, whose amplitude on guess
// |0, F> is sqrt(M(N,k) / 2^N) for every F.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qql/bounds.hpp"
#include "qql/combinatorics.hpp"
#include "qql/errors.hpp"
#include "qql/oracle.hpp"
#include "qql/simulator.hpp"

namespace qql {

struct AlgorithmBundle {
  Algorithm algorithm;
  Measurement measurement;
  FunctionFamily family;
  Rational predicted_success;
};

/// M(N,k) / 2^N.
inline Rational predicted_success(int domain_size, int queries) {
  if (domain_size < 1 || queries < 0 || queries > domain_size) {
    throw ParameterError("predicted success needs 0 <= k <= N");
  }
  return Rational(m_sum(static_cast<std::uint64_t>(domain_size), static_cast<std::uint64_t>(queries)),
                  BigInt(1) << domain_size);
}

inline AlgorithmBundle build_character_distinguisher(int n) {
  if (n < 1 || n > 6) {
    throw ParameterError("character distinguisher needs 1 <= n <= 6, got " + std::to_string(n));
  }
  const int domain = (1 << n) - 1;
  const Basis basis(Picture::phase, domain, 1);
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  const auto labels = static_cast<Eigen::Index>(domain) + 1;

  Vector s = Vector::Zero(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(labels));
  for (Eigen::Index x = 0; x < labels; ++x) s(x) = amp;

  Matrix v = Matrix::Identity(dim, dim);
  for (Eigen::Index b = 0; b < labels; ++b) {
    for (Eigen::Index x = 0; x < labels; ++x) {
      const int sign = chi_bits(static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(x));
      v(b, x) = amp * sign;
    }
  }

  // Outcome a is phase label |a>; the unused symmetric labels join outcome 0
  // so the measurement is complete.
  std::vector<std::size_t> outcome(basis.dim(), 0);
  for (std::size_t a = 0; a < static_cast<std::size_t>(labels); ++a) outcome[a] = a;

  std::vector<Unitary> us;
  us.push_back(Unitary::dense(std::move(v)));
  return AlgorithmBundle{Algorithm(basis, std::move(s), std::move(us)),
                         Measurement::standard(std::move(outcome), static_cast<std::size_t>(labels)),
                         character_family(n), Rational(1)};
}

namespace detail {

/// i-th smallest element (1-based i) of the subset mask, 0 if |S| < i.
inline int ith_element(std::uint64_t subset, int i) {
  for (int seen = 1; subset != 0; subset &= subset - 1, ++seen) {
    if (seen == i) return std::countr_zero(subset) + 1;
  }
  return 0;
}

/// Within every subset block, exchange query-index labels a(S) and b(S).
template <class From, class To>
Unitary swap_query_index(const Basis& basis, From from, To to) {
  std::vector<std::size_t> image(basis.dim());
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = i;
  const auto subsets = static_cast<std::uint64_t>(basis.workspace);
  for (std::uint64_t s = 0; s < subsets; ++s) {
    const int a = from(s);
    const int b = to(s);
    if (a == b) continue;
    const int w = static_cast<int>(s);
    const auto ia = basis.phase_index(a, w);
    const auto ib = basis.phase_index(b, w);
    image[ia] = ib;
    image[ib] = ia;
  }
  return Unitary::permutation(std::move(image));
}

}  // namespace detail

inline constexpr int kMaxUniformSubsetDomain = 12;

inline AlgorithmBundle build_uniform_subset_algorithm(int domain_size, int queries) {
  if (domain_size > kMaxUniformSubsetDomain) {
    throw CapacityError("uniform-subset algorithm needs N <= " +
                        std::to_string(kMaxUniformSubsetDomain) + " (state dimension 2N 2^N)");
  }
  if (domain_size < 1 || queries < 1 || queries > domain_size) {
    throw ParameterError("uniform-subset algorithm needs 1 <= k <= N");
  }
  const int n = domain_size;
  const int k = queries;
  const int subsets = 1 << n;
  const Basis basis(Picture::phase, n, subsets);

  const double amp = 1.0 / std::sqrt(static_cast<double>(detail::m_sum_u64(n, k)));
  Vector s = Vector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (int w = 0; w < subsets; ++w) {
    if (std::popcount(static_cast<unsigned>(w)) > k) continue;
    const int x = detail::ith_element(static_cast<std::uint64_t>(w), 1);
    s(static_cast<Eigen::Index>(basis.phase_index(x, w))) = amp;
  }

  std::vector<Unitary> us;
  us.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i < k; ++i) {
    us.push_back(detail::swap_query_index(
        basis, [i](std::uint64_t sub) { return detail::ith_element(sub, i); },
        [i](std::uint64_t sub) { return detail::ith_element(sub, i + 1); }));
  }
  const Unitary unload = detail::swap_query_index(
      basis, [k](std::uint64_t sub) { return detail::ith_element(sub, k); },
      [](std::uint64_t) { return 0; });
  us.push_back(unload.then(Unitary::workspace_walsh(basis.dim(), static_cast<std::size_t>(subsets))));

  // Guess G is the workspace value; family member G has mask G.
  std::vector<std::size_t> outcome(basis.dim());
  for (std::size_t i = 0; i < outcome.size(); ++i) outcome[i] = i % static_cast<std::size_t>(subsets);

  return AlgorithmBundle{Algorithm(basis, std::move(s), std::move(us)),
                         Measurement::standard(std::move(outcome), static_cast<std::size_t>(subsets)),
                         all_functions(n), predicted_success(n, k)};
}

}  // namespace qql
