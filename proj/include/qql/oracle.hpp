#pragma once

// Boolean functions F: {1..N} -> {-1,+1}, function families and the
// characters chi_S(F) = prod_{x in S} F(x).
//
// A function is stored as an N-bit mask: bit x-1 set means F(x) = -1.
// Under that encoding chi_S(F) = (-1)^popcount(S & F), which makes the
// character transform over all 2^N functions a Walsh-Hadamard transform
// over masks.

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qql/errors.hpp"

namespace qql {

inline constexpr int kMaxDomainSize = 64;
inline constexpr int kMaxEnumeratedDomain = 20;

namespace detail {

inline constexpr std::uint64_t low_bits(int n) {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

inline void check_domain_size(int n) {
  if (n < 1 || n > kMaxDomainSize) {
    throw ParameterError("domain size must be in 1.." +
                         std::to_string(kMaxDomainSize) + ", got " +
                         std::to_string(n));
  }
}

}  // namespace detail

/// A subset S of {1..N}, bit x-1 set iff x is in S.
class SubsetMask {
 public:
  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(std::uint64_t bits) : bits_(bits) {}

  /// Builds a subset from 1-based elements.
  static SubsetMask from_elements(const std::vector<int>& elements) {
    std::uint64_t bits = 0;
    for (int x : elements) {
      if (x < 1 || x > kMaxDomainSize) {
        throw DomainError("subset element " + std::to_string(x) +
                          " outside 1.." + std::to_string(kMaxDomainSize));
      }
      const std::uint64_t bit = std::uint64_t{1} << (x - 1);
      if (bits & bit) {
        throw ValidationError("repeated subset element " + std::to_string(x));
      }
      bits |= bit;
    }
    return SubsetMask(bits);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int x) const {
    return x >= 1 && x <= kMaxDomainSize && ((bits_ >> (x - 1)) & 1U);
  }
  /// Largest element, or 0 for the empty set.
  constexpr int max_element() const {
    return bits_ == 0 ? 0 : 64 - std::countl_zero(bits_);
  }

  /// Elements in increasing order, 1-based.
  std::vector<int> elements() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(std::countr_zero(b) + 1);
    }
    return out;
  }

  friend constexpr bool operator==(SubsetMask, SubsetMask) = default;

 private:
  std::uint64_t bits_ = 0;
};

class BooleanFunction {
 public:
  BooleanFunction(int domain_size, std::uint64_t minus_mask)
      : domain_size_(domain_size), mask_(minus_mask) {
    detail::check_domain_size(domain_size);
    if ((mask_ & ~detail::low_bits(domain_size)) != 0) {
      throw ValidationError("function mask has bits beyond domain size " +
                            std::to_string(domain_size));
    }
  }

  /// Parses a sign string: character i is '+' or '-' for F(i+1).
  static BooleanFunction from_signs(std::string_view signs) {
    const int n = static_cast<int>(signs.size());
    if (n < 1 || n > kMaxDomainSize) {
      throw ValidationError("sign string length must be in 1.." +
                            std::to_string(kMaxDomainSize));
    }
    std::uint64_t mask = 0;
    for (int i = 0; i < n; ++i) {
      if (signs[i] == '-') {
        mask |= std::uint64_t{1} << i;
      } else if (signs[i] != '+') {
        throw ValidationError("sign string may only contain '+' and '-', got '" +
                              std::string(signs) + "'");
      }
    }
    return BooleanFunction(n, mask);
  }

  static BooleanFunction constant_one(int domain_size) {
    return BooleanFunction(domain_size, 0);
  }

  int domain_size() const { return domain_size_; }
  std::uint64_t mask() const { return mask_; }

  /// F(x) for x in 0..N, with F(0) = +1.
  int operator()(int x) const {
    if (x < 0 || x > domain_size_) {
      throw DomainError("argument " + std::to_string(x) + " outside 0.." +
                        std::to_string(domain_size_));
    }
    if (x == 0) return 1;
    return ((mask_ >> (x - 1)) & 1U) ? -1 : 1;
  }

  std::string to_signs() const {
    std::string s(static_cast<std::size_t>(domain_size_), '+');
    for (int i = 0; i < domain_size_; ++i) {
      if ((mask_ >> i) & 1U) s[static_cast<std::size_t>(i)] = '-';
    }
    return s;
  }

  /// Pointwise product.
  BooleanFunction operator*(const BooleanFunction& other) const {
    if (other.domain_size_ != domain_size_) {
      throw ModelError("pointwise product of functions on different domains");
    }
    return BooleanFunction(domain_size_, mask_ ^ other.mask_);
  }

  friend bool operator==(const BooleanFunction&, const BooleanFunction&) = default;

 private:
  int domain_size_;
  std::uint64_t mask_;
};

inline int evaluate(const BooleanFunction& f, int x) { return f(x); }

/// chi_S(F) = prod_{x in S} F(x); +1 for the empty set.
inline int chi(SubsetMask s, const BooleanFunction& f) {
  if ((s.bits() & ~detail::low_bits(f.domain_size())) != 0) {
    throw ModelError("subset is not contained in the function's domain");
  }
  return (std::popcount(s.bits() & f.mask()) & 1) ? -1 : 1;
}

/// Character value on raw masks, no validation. Used in inner loops.
inline constexpr int chi_bits(std::uint64_t subset, std::uint64_t function) {
  return (std::popcount(subset & function) & 1) ? -1 : 1;
}

/// An ordered list of D >= 1 distinct functions on a common domain.
class FunctionFamily {
 public:
  FunctionFamily(int domain_size, std::vector<BooleanFunction> members)
      : domain_size_(domain_size), members_(std::move(members)) {
    detail::check_domain_size(domain_size);
    if (members_.empty()) {
      throw ValidationError("function family must have at least one member");
    }
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const auto& f = members_[i];
      if (f.domain_size() != domain_size_) {
        throw ValidationError("family member " + std::to_string(i) +
                              " has domain size " +
                              std::to_string(f.domain_size()) + ", expected " +
                              std::to_string(domain_size_));
      }
      if (!seen.insert(f.mask()).second) {
        throw ValidationError("duplicate family member " + f.to_signs());
      }
    }
  }

  int domain_size() const { return domain_size_; }
  std::size_t size() const { return members_.size(); }
  const BooleanFunction& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<BooleanFunction>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  /// Index of f in the family, or size() if absent.
  std::size_t index_of(const BooleanFunction& f) const {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i] == f) return i;
    }
    return members_.size();
  }

 private:
  int domain_size_;
  std::vector<BooleanFunction> members_;
};

/// G_j(x) = -1 iff x = j, for j = 1..N.
inline FunctionFamily grover_family(int domain_size) {
  detail::check_domain_size(domain_size);
  std::vector<BooleanFunction> fs;
  fs.reserve(static_cast<std::size_t>(domain_size));
  for (int j = 1; j <= domain_size; ++j) {
    fs.emplace_back(domain_size, std::uint64_t{1} << (j - 1));
  }
  return FunctionFamily(domain_size, std::move(fs));
}

/// f_a(x) = (-1)^{a.x} on N = 2^n - 1 points, a = 0..N, where a.x is the
/// parity of popcount(a & x) on binary representations.
inline FunctionFamily character_family(int n) {
  if (n < 1 || n > 6) {
    throw ParameterError("character family needs 1 <= n <= 6, got " +
                         std::to_string(n));
  }
  const int domain = (1 << n) - 1;
  std::vector<BooleanFunction> fs;
  fs.reserve(static_cast<std::size_t>(domain) + 1);
  for (int a = 0; a <= domain; ++a) {
    std::uint64_t mask = 0;
    for (int x = 1; x <= domain; ++x) {
      if (std::popcount(static_cast<unsigned>(a & x)) & 1) {
        mask |= std::uint64_t{1} << (x - 1);
      }
    }
    fs.emplace_back(domain, mask);
  }
  return FunctionFamily(domain, std::move(fs));
}

/// All 2^N functions in mask order (member i has mask i).
inline FunctionFamily all_functions(int domain_size) {
  detail::check_domain_size(domain_size);
  if (domain_size > kMaxEnumeratedDomain) {
    throw CapacityError("refusing to enumerate all functions for N = " +
                        std::to_string(domain_size) + " > " +
                        std::to_string(kMaxEnumeratedDomain));
  }
  const std::uint64_t count = std::uint64_t{1} << domain_size;
  std::vector<BooleanFunction> fs;
  fs.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) fs.emplace_back(domain_size, m);
  return FunctionFamily(domain_size, std::move(fs));
}

enum class FamilyKind { grover, characters, all };

/// Generated families keyed by domain size N. For characters N + 1 must be a
/// power of two.
inline FunctionFamily make_family(FamilyKind kind, int domain_size) {
  switch (kind) {
    case FamilyKind::grover:
      return grover_family(domain_size);
    case FamilyKind::characters: {
      const auto np1 = static_cast<std::uint64_t>(domain_size) + 1;
      if (domain_size < 1 || !std::has_single_bit(np1)) {
        throw ParameterError("character family needs N + 1 a power of two, got N = " +
                             std::to_string(domain_size));
      }
      return character_family(std::countr_zero(np1));
    }
    case FamilyKind::all:
      return all_functions(domain_size);
  }
  throw ParameterError("unknown family kind");
}

/// Explicit family from masks; duplicates are rejected.
inline FunctionFamily make_family(int domain_size,
                                  const std::vector<std::uint64_t>& masks) {
  std::vector<BooleanFunction> fs;
  fs.reserve(masks.size());
  for (auto m : masks) fs.emplace_back(domain_size, m);
  return FunctionFamily(domain_size, std::move(fs));
}

}  // namespace qql
