#pragma once

// Test-only helpers: random algorithms/measurements and brute-force
// reference computations that deliberately avoid the library's fast paths.

#include <complex>
#include <random>
#include <vector>

#include "qql/qql.hpp"

namespace qql::testing {

inline Algorithm random_algorithm(const Basis& basis, int k, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  std::vector<Unitary> us;
  for (int i = 0; i < k; ++i) us.push_back(Unitary::dense(random_unitary(d, rng)));
  return Algorithm(basis, random_state(d, rng), std::move(us));
}

/// Complete projective measurement: a random orthonormal basis split into
/// `outcomes` groups of random (possibly zero) sizes.
inline Measurement random_measurement(std::size_t dim, std::size_t outcomes, std::mt19937_64& rng) {
  const Matrix u = random_unitary(static_cast<Eigen::Index>(dim), rng);
  std::uniform_int_distribution<std::size_t> pick(0, outcomes - 1);
  std::vector<std::vector<Vector>> groups(outcomes);
  for (std::size_t i = 0; i < dim; ++i) {
    // Every outcome gets at least one vector while there are enough.
    const std::size_t l = i < outcomes ? i : pick(rng);
    groups[l].push_back(u.col(static_cast<Eigen::Index>(i)));
  }
  return Measurement(dim, groups);
}

/// Dense oracle matrix built straight from the definitions, independent of
/// the in-place oracle kernels.
inline Matrix dense_oracle(const Basis& b, const BooleanFunction& f) {
  const auto d = static_cast<Eigen::Index>(b.dim());
  Matrix o = Matrix::Zero(d, d);
  if (b.picture == Picture::bitflip) {
    for (int x = 1; x <= b.domain_size; ++x) {
      for (int q : {1, -1}) {
        for (int w = 0; w < b.workspace; ++w) {
          const auto from = static_cast<Eigen::Index>(b.bitflip_index(x, q, w));
          const auto to = static_cast<Eigen::Index>(b.bitflip_index(x, q * f(x), w));
          o(to, from) = 1.0;
        }
      }
    }
  } else {
    for (Eigen::Index i = 0; i < d; ++i) o(i, i) = 1.0;
    for (int x = 1; x <= b.domain_size; ++x) {
      for (int w = 0; w < b.workspace; ++w) {
        const auto i = static_cast<Eigen::Index>(b.phase_index(x, w));
        o(i, i) = static_cast<double>(f(x));
      }
    }
  }
  return o;
}

/// C(n, i) from factorials, independent of the multiplicative recurrence.
inline BigInt factorial_binomial(std::uint64_t n, std::uint64_t i) {
  auto fact = [](std::uint64_t m) {
    BigInt r = 1;
    for (std::uint64_t t = 2; t <= m; ++t) r *= t;
    return r;
  };
  return fact(n) / (fact(i) * fact(n - i));
}

/// sum_F |Q(F)|^2 by evaluating Q one function at a time.
inline double brute_force_square_sum(const MultilinearPolynomial& q) {
  double s = 0.0;
  const std::uint64_t count = std::uint64_t{1} << q.domain_size();
  for (std::uint64_t m = 0; m < count; ++m) s += std::norm(evaluate_poly(q, BooleanFunction(q.domain_size(), m)));
  return s;
}

template <class Rng>
MultilinearPolynomial random_polynomial(int n, int k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MultilinearPolynomial q(n, k);
  for (auto& a : q.coefficients()) a = {normal(rng), normal(rng)};
  return q;
}

}  // namespace qql::testing
