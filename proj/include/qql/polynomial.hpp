#pragma once

// Multilinear polynomials in the values F(1..N),
//
//   Q(F) = sum_{|S| <= k} a_S chi_S(F),
//
// and the polynomial method: every amplitude of a k-query algorithm is such
// a Q, sum_F |Q(F)|^2 = 2^N sum_S |a_S|^2, and |Q(F0)| = 1 forces
// sum_F |Q(F)|^2 >= 2^N / M(N,k).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qql/bounds.hpp"
#include "qql/combinatorics.hpp"
#include "qql/errors.hpp"
#include "qql/oracle.hpp"
#include "qql/simulator.hpp"
#include "qql/walsh.hpp"

namespace qql {

inline constexpr double kDegreeCertificateTol = 1e-10;
inline constexpr int kMaxPolynomialDomain = 16;

/// Coefficients a_S for every |S| <= degree_cap, stored densely in
/// (popcount, numeric value) order of S.
class MultilinearPolynomial {
 public:
  MultilinearPolynomial(int domain_size, int degree_cap)
      : domain_size_(domain_size), degree_cap_(degree_cap) {
    if (domain_size < 1 || domain_size > kMaxPolynomialDomain) {
      throw CapacityError("polynomial domain size must be in 1.." +
                          std::to_string(kMaxPolynomialDomain));
    }
    if (degree_cap < 0 || degree_cap > domain_size) {
      throw ParameterError("degree cap must lie in 0..N");
    }
    coefficients_.assign(detail::m_sum_u64(domain_size, degree_cap), Complex{});
  }

  int domain_size() const { return domain_size_; }
  int degree_cap() const { return degree_cap_; }
  std::size_t term_count() const { return coefficients_.size(); }

  std::size_t rank_of(SubsetMask s) const {
    check_subset(s);
    const int m = s.size();
    const std::uint64_t offset = m == 0 ? 0 : detail::m_sum_u64(domain_size_, m - 1);
    return static_cast<std::size_t>(offset + detail::colex_rank(s.bits()));
  }

  SubsetMask subset_at(std::size_t rank) const {
    if (rank >= coefficients_.size()) throw DomainError("coefficient rank out of range");
    int m = 0;
    std::uint64_t offset = 0;
    while (offset + detail::binomial_u64(domain_size_, m) <= rank) {
      offset += detail::binomial_u64(domain_size_, m);
      ++m;
    }
    return SubsetMask(detail::colex_unrank(rank - offset, m, domain_size_));
  }

  Complex coefficient(SubsetMask s) const { return coefficients_[rank_of(s)]; }
  void set_coefficient(SubsetMask s, Complex a) { coefficients_[rank_of(s)] = a; }

  const std::vector<Complex>& coefficients() const { return coefficients_; }
  std::vector<Complex>& coefficients() { return coefficients_; }

  /// Largest |S| with a_S != 0 exactly; 0 for the zero polynomial.
  int degree() const {
    for (std::size_t r = coefficients_.size(); r-- > 0;) {
      if (coefficients_[r] != Complex{}) return subset_at(r).size();
    }
    return 0;
  }

 private:
  void check_subset(SubsetMask s) const {
    if ((s.bits() & ~detail::low_bits(domain_size_)) != 0) {
      throw ModelError("subset not contained in polynomial domain");
    }
    if (s.size() > degree_cap_) {
      throw DomainError("subset of size " + std::to_string(s.size()) +
                        " exceeds degree cap " + std::to_string(degree_cap_));
    }
  }

  int domain_size_;
  int degree_cap_;
  std::vector<Complex> coefficients_;
};

/// sum_S a_S chi_S(F).
inline Complex evaluate_poly(const MultilinearPolynomial& q, const BooleanFunction& f) {
  if (f.domain_size() != q.domain_size()) throw ModelError("polynomial and function domains differ");
  Complex acc{};
  for (std::size_t r = 0; r < q.term_count(); ++r) {
    acc += static_cast<double>(chi_bits(q.subset_at(r).bits(), f.mask())) * q.coefficients()[r];
  }
  return acc;
}

/// Q(F) for every mask F = 0..2^N-1, by one Walsh-Hadamard transform.
inline std::vector<Complex> evaluate_all(const MultilinearPolynomial& q) {
  const std::size_t size = std::size_t{1} << q.domain_size();
  std::vector<Complex> dense(size, Complex{});
  for (std::size_t r = 0; r < q.term_count(); ++r) {
    dense[static_cast<std::size_t>(q.subset_at(r).bits())] = q.coefficients()[r];
  }
  walsh_hadamard(std::span<Complex>(dense));
  return dense;
}

/// sum_S |a_S|^2, equal to 2^-N sum_F |Q(F)|^2.
inline double parseval(const MultilinearPolynomial& q) {
  double s = 0.0;
  for (const auto& a : q.coefficients()) s += std::norm(a);
  return s;
}

/// 2^N / M(N,k).
inline Rational lemma_floor(int domain_size, int degree) {
  if (domain_size < 1 || degree < 0 || degree > domain_size) {
    throw ParameterError("lemma floor needs 0 <= k <= N and N >= 1");
  }
  const BigInt two_n = BigInt(1) << domain_size;
  return Rational(two_n, m_sum(static_cast<std::uint64_t>(domain_size),
                               static_cast<std::uint64_t>(degree)));
}

/// The equal-magnitude polynomial a_S = chi_S(F0)/M(N,k), which has
/// Q(F0) = 1 and attains the lemma floor.
inline MultilinearPolynomial minimizer(int domain_size, int degree, const BooleanFunction& f0) {
  if (f0.domain_size() != domain_size) throw ModelError("F0 domain does not match N");
  MultilinearPolynomial q(domain_size, degree);
  const double inv_m = 1.0 / static_cast<double>(q.term_count());
  for (std::size_t r = 0; r < q.term_count(); ++r) {
    q.coefficients()[r] = inv_m * static_cast<double>(chi_bits(q.subset_at(r).bits(), f0.mask()));
  }
  return q;
}

struct LemmaAudit {
  bool applicable = false;
  double value_at_f0 = 0.0;  // |Q(F0)|
  int degree = 0;
  double sum = 0.0;          // sum_F |Q(F)|^2, by direct evaluation
  Rational floor;            // 2^N / M(N, degree)
  bool pass = false;
};

/// Checks sum_F |Q(F)|^2 >= 2^N / M(N, deg Q) for Q with |Q(F0)| = 1.
inline LemmaAudit lemma_audit(const MultilinearPolynomial& q, const BooleanFunction& f0) {
  LemmaAudit audit;
  audit.value_at_f0 = std::abs(evaluate_poly(q, f0));
  audit.degree = q.degree();
  audit.floor = lemma_floor(q.domain_size(), audit.degree);
  audit.applicable = std::abs(audit.value_at_f0 - 1.0) <= 1e-9;
  if (!audit.applicable) return audit;
  for (const auto& v : evaluate_all(q)) audit.sum += std::norm(v);
  audit.pass = audit.sum >= to_double(audit.floor) - 1e-12;
  return audit;
}

/// Q_{l r} for every outcome l and every basis vector r of its subspace,
/// recovered from amplitudes over all 2^N functions.
struct PolynomialExtraction {
  std::vector<std::vector<MultilinearPolynomial>> outcomes;
  int degree_cap = 0;
  /// max |a_S| over |S| > k; the degree certificate.
  double max_high_degree_coefficient = 0.0;
  /// max over F and l of | sum_r |Q_lr(F)|^2 - ||P_l psi_F||^2 |.
  double max_reconstruction_error = 0.0;

  bool certified() const { return max_high_degree_coefficient <= kDegreeCertificateTol; }
};

inline PolynomialExtraction extract_polynomials(const Algorithm& alg, const Measurement& m) {
  const int n = alg.basis().domain_size;
  if (n > kMaxPolynomialDomain) {
    throw CapacityError("polynomial extraction needs N <= " + std::to_string(kMaxPolynomialDomain));
  }
  if (m.dim() != alg.dim()) throw ModelError("measurement dimension does not match algorithm");
  const std::size_t functions = std::size_t{1} << n;
  const std::size_t dim = alg.dim();
  if (dim * functions > (std::size_t{1} << 24)) {
    throw CapacityError("amplitude table of " + std::to_string(dim) + " x " +
                        std::to_string(functions) + " exceeds the extraction budget");
  }
  const int k = std::min(alg.k(), n);

  // coords[r * functions + F] = <b_r | psi_F>
  std::vector<Complex> coords(dim * functions);
  std::vector<std::vector<double>> probs(functions);
  for (std::size_t f = 0; f < functions; ++f) {
    const Vector psi = run_amplitudes(alg, BooleanFunction(n, f));
    const Vector c = m.coordinates(psi);
    for (std::size_t r = 0; r < dim; ++r) coords[r * functions + f] = c(static_cast<Eigen::Index>(r));
    probs[f] = outcome_probabilities(psi, m);
  }

  PolynomialExtraction out;
  out.degree_cap = k;
  out.outcomes.resize(m.outcome_count());
  std::vector<std::vector<double>> reconstructed(functions, std::vector<double>(m.outcome_count(), 0.0));
  const double inv = 1.0 / static_cast<double>(functions);
  for (std::size_t r = 0; r < dim; ++r) {
    std::span<Complex> row(coords.data() + r * functions, functions);
    walsh_hadamard(row);  // now 2^N a_S, indexed by S
    MultilinearPolynomial q(n, k);
    for (std::size_t s = 0; s < functions; ++s) {
      const Complex a = row[s] * inv;
      if (std::popcount(s) > k) {
        out.max_high_degree_coefficient = std::max(out.max_high_degree_coefficient, std::abs(a));
      } else {
        q.set_coefficient(SubsetMask(s), a);
      }
    }
    const auto values = evaluate_all(q);
    const auto label = m.labels()[r];
    for (std::size_t f = 0; f < functions; ++f) reconstructed[f][label] += std::norm(values[f]);
    out.outcomes[label].push_back(std::move(q));
  }
  for (std::size_t f = 0; f < functions; ++f) {
    for (std::size_t l = 0; l < m.outcome_count(); ++l) {
      out.max_reconstruction_error =
          std::max(out.max_reconstruction_error, std::abs(reconstructed[f][l] - probs[f][l]));
    }
  }
  return out;
}

}  // namespace qql
