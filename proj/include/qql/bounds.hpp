#pragma once

// Exact counting bounds on how many functions k queries can distinguish.
//
//   M(N,k) = 1 + C(N,1) + ... + C(N,k)
//   D <= M(N,k) / p
//
// All arithmetic is arbitrary precision: N = C(200,2) = 19900 is routine.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "qql/errors.hpp"

namespace qql {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "a/b", "a" or a decimal such as "0.875" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  auto digits_only = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  };
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    if (!digits_only(num) || !digits_only(den)) {
      throw ParameterError("malformed rational '" + text + "'");
    }
    const BigInt d(den);
    if (d == 0) throw ParameterError("zero denominator in '" + text + "'");
    return Rational(BigInt(num), d);
  }
  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    const bool negative = !whole.empty() && whole[0] == '-';
    const std::string whole_digits =
        (whole.empty() || whole == "-" || whole == "+") ? std::string("0") : whole;
    if (!digits_only(whole_digits) || (!frac.empty() && !digits_only(frac)) ||
        (!frac.empty() && (frac[0] == '-' || frac[0] == '+'))) {
      throw ParameterError("malformed decimal '" + text + "'");
    }
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt w(whole_digits);
    if (w < 0) w = -w;
    const BigInt f = frac.empty() ? BigInt(0) : BigInt(frac);
    Rational r(w * scale + f, scale);
    return negative ? Rational(-r) : r;
  }
  if (!digits_only(text)) throw ParameterError("malformed rational '" + text + "'");
  return Rational(BigInt(text));
}

inline std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// C(N,0), C(N,1), ..., C(N,k) by the multiplicative recurrence.
inline std::vector<BigInt> binomial_terms(std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    throw ParameterError("k = " + std::to_string(k) + " exceeds N = " + std::to_string(n));
  }
  std::vector<BigInt> terms;
  terms.reserve(static_cast<std::size_t>(k) + 1);
  BigInt c = 1;
  terms.push_back(c);
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - i + 1) / i;
    terms.push_back(c);
  }
  return terms;
}

/// M(N,k) = sum_{i=0}^{k} C(N,i). k > N is rejected, not clamped.
inline BigInt m_sum(std::uint64_t n, std::uint64_t k) {
  BigInt s = 0;
  for (const auto& t : binomial_terms(n, k)) s += t;
  return s;
}

/// floor(M(N,k) / p).
inline BigInt max_distinguishable(std::uint64_t n, std::uint64_t k, const Rational& p) {
  if (p <= 0 || p > 1) throw ParameterError("success probability must lie in (0, 1]");
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const Rational q = Rational(m_sum(n, k)) / p;
  return numerator(q) / denominator(q);
}

struct BoundQuery {
  std::uint64_t domain_size = 1;
  std::uint64_t queries = 0;
  Rational probability = 1;
  BigInt family_size = 1;

  void validate() const {
    if (queries > domain_size) throw ParameterError("query budget k exceeds N");
    if (probability <= 0 || probability > 1) {
      throw ParameterError("success probability must lie in (0, 1]");
    }
    if (family_size < 1) throw ParameterError("family size D must be >= 1");
  }
};

/// Necessary condition D p <= M(N,k). false means no k-query algorithm can
/// reach worst-case success p on any D-member family.
inline bool is_feasible(const BoundQuery& q) {
  q.validate();
  return Rational(q.family_size) * q.probability <= Rational(m_sum(q.domain_size, q.queries));
}

struct SortingBound {
  std::uint64_t items = 0;        // n
  std::uint64_t domain_size = 0;  // N = C(n,2)
  BigInt orderings;               // D = n!
  std::uint64_t k_min = 0;
  BigInt m_sum_at_k_min;          // M(N, k_min) >= n!
  BigInt m_sum_below;             // M(N, k_min - 1) < n!
};

/// Smallest k with n! <= M(C(n,2), k), found by accumulating binomials
/// incrementally.
inline SortingBound sorting_lower_bound(std::uint64_t n) {
  if (n < 2) throw ParameterError("sorting bound needs n >= 2");
  SortingBound out;
  out.items = n;
  out.domain_size = n * (n - 1) / 2;
  out.orderings = 1;
  for (std::uint64_t i = 2; i <= n; ++i) out.orderings *= i;

  const std::uint64_t big_n = out.domain_size;
  BigInt term = 1;  // C(N, 0)
  BigInt sum = 1;
  BigInt previous = 0;
  std::uint64_t k = 0;
  while (sum < out.orderings) {
    ++k;
    term = term * (big_n - k + 1) / k;
    previous = sum;
    sum += term;
  }
  out.k_min = k;
  out.m_sum_at_k_min = sum;
  out.m_sum_below = previous;
  return out;
}

}  // namespace qql
