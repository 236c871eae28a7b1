#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "support.hpp"

using namespace qql;
using qql::testing::brute_force_square_sum;
using qql::testing::random_algorithm;
using qql::testing::random_measurement;
using qql::testing::random_polynomial;

TEST(Ranking, RankUnrankRoundTrip) {
  for (int n = 1; n <= 10; ++n) {
    for (int k = 0; k <= n; ++k) {
      const MultilinearPolynomial q(n, k);
      std::set<std::uint64_t> seen;
      int last_size = 0;
      for (std::size_t r = 0; r < q.term_count(); ++r) {
        const SubsetMask s = q.subset_at(r);
        ASSERT_LE(s.size(), k);
        ASSERT_GE(s.size(), last_size);
        last_size = s.size();
        ASSERT_EQ(q.rank_of(s), r);
        seen.insert(s.bits());
      }
      ASSERT_EQ(seen.size(), q.term_count());
    }
  }
}

TEST(Ranking, PopcountThenNumericOrder) {
  const MultilinearPolynomial q(3, 2);
  const std::vector<std::uint64_t> expected = {0, 1, 2, 4, 3, 5, 6};
  ASSERT_EQ(q.term_count(), expected.size());
  for (std::size_t r = 0; r < expected.size(); ++r) EXPECT_EQ(q.subset_at(r).bits(), expected[r]);
}

TEST(Polynomial, CapAndDomainChecks) {
  MultilinearPolynomial q(3, 1);
  EXPECT_THROW(q.set_coefficient(SubsetMask(3), 1.0), DomainError);
  EXPECT_THROW(q.set_coefficient(SubsetMask(8), 1.0), ModelError);
  EXPECT_THROW(MultilinearPolynomial(3, 4), ParameterError);
  EXPECT_THROW(MultilinearPolynomial(17, 1), CapacityError);
}

TEST(EvaluatePoly, Constant) {
  MultilinearPolynomial q(3, 0);
  q.set_coefficient(SubsetMask{}, 1.0);
  for (std::uint64_t m = 0; m < 8; ++m) EXPECT_EQ(evaluate_poly(q, BooleanFunction(3, m)), Complex(1.0));
}

TEST(EvaluatePoly, SingleMonomial) {
  MultilinearPolynomial q(3, 1);
  q.set_coefficient(SubsetMask::from_elements({1}), 1.0);
  EXPECT_EQ(evaluate_poly(q, BooleanFunction::from_signs("-++")), Complex(-1.0));
  EXPECT_EQ(evaluate_poly(q, BooleanFunction::from_signs("+--")), Complex(1.0));
}

TEST(EvaluatePoly, FastPathMatchesDirectSum) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 8; ++n) {
    const auto q = random_polynomial(n, (n + 1) / 2, rng);
    const auto all = evaluate_all(q);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      Complex direct{};
      for (std::size_t r = 0; r < q.term_count(); ++r) {
        direct += q.coefficients()[r] * static_cast<double>(chi(q.subset_at(r), BooleanFunction(n, m)));
      }
      ASSERT_LT(std::abs(all[m] - direct), 1e-12);
      ASSERT_LT(std::abs(evaluate_poly(q, BooleanFunction(n, m)) - direct), 1e-12);
    }
  }
}

TEST(Parseval, Constant) {
  MultilinearPolynomial q(4, 0);
  q.set_coefficient(SubsetMask{}, 1.0);
  EXPECT_DOUBLE_EQ(parseval(q), 1.0);
}

TEST(Parseval, RandomMatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 12; ++n) {
    for (int k : {0, n / 2, n}) {
      const auto q = random_polynomial(n, k, rng);
      const double direct = brute_force_square_sum(q) / std::ldexp(1.0, n);
      EXPECT_NEAR(parseval(q), direct, 1e-12 * direct) << "n=" << n << " k=" << k;
    }
  }
}

TEST(LemmaFloor, Values) {
  EXPECT_EQ(lemma_floor(3, 2), Rational(8, 7));
  for (int n = 1; n <= 16; ++n) EXPECT_EQ(lemma_floor(n, n), Rational(1));
  EXPECT_EQ(lemma_floor(1, 0), Rational(2));
}

TEST(Minimizer, EqualCoefficients) {
  const auto q = minimizer(2, 1, BooleanFunction::constant_one(2));
  ASSERT_EQ(q.term_count(), 3U);
  for (const auto& a : q.coefficients()) EXPECT_NEAR(std::abs(a - Complex(1.0 / 3.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(evaluate_poly(q, BooleanFunction::constant_one(2)) - 1.0), 0.0, 1e-15);
}

TEST(Minimizer, AchievesFloor) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 10; ++n) {
    for (int k = 0; k <= n; ++k) {
      const BooleanFunction f0(n, rng() & ((std::uint64_t{1} << n) - 1));
      const auto q = minimizer(n, k, f0);
      EXPECT_NEAR(std::abs(evaluate_poly(q, f0) - 1.0), 0.0, 1e-12);
      const double floor = to_double(lemma_floor(n, k));
      EXPECT_NEAR(brute_force_square_sum(q), floor, 1e-12);
      EXPECT_NEAR(parseval(q), 1.0 / to_double(Rational(m_sum(n, k))), 1e-15);
    }
  }
}

TEST(LemmaAudit, MinimizerIsEquality) {
  const auto f0 = BooleanFunction::from_signs("+-+-");
  const auto a = lemma_audit(minimizer(4, 2, f0), f0);
  EXPECT_TRUE(a.applicable);
  EXPECT_TRUE(a.pass);
  EXPECT_NEAR(a.sum, to_double(a.floor), 1e-12);
}

TEST(LemmaAudit, SingleMonomial) {
  MultilinearPolynomial q(3, 1);
  q.set_coefficient(SubsetMask::from_elements({1}), 1.0);
  const auto a = lemma_audit(q, BooleanFunction::constant_one(3));
  EXPECT_TRUE(a.applicable);
  EXPECT_NEAR(a.sum, 8.0, 1e-12);
  EXPECT_EQ(a.floor, Rational(2));
  EXPECT_TRUE(a.pass);
}

TEST(LemmaAudit, NotApplicableWhenUnnormalized) {
  MultilinearPolynomial q(3, 1);
  q.set_coefficient(SubsetMask{}, 0.5);
  const auto a = lemma_audit(q, BooleanFunction::constant_one(3));
  EXPECT_FALSE(a.applicable);
  EXPECT_FALSE(a.pass);
}

TEST(LemmaAudit, RandomRescaled) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick_n(1, 8);
  for (int t = 0; t < 200; ++t) {
    const int n = pick_n(rng);
    const int k = std::uniform_int_distribution<int>(0, n)(rng);
    auto q = random_polynomial(n, k, rng);
    const BooleanFunction f0(n, rng() & ((std::uint64_t{1} << n) - 1));
    const Complex v = evaluate_poly(q, f0);
    for (auto& a : q.coefficients()) a /= v;
    const auto audit = lemma_audit(q, f0);
    ASSERT_TRUE(audit.applicable);
    ASSERT_TRUE(audit.pass) << "sum " << audit.sum << " floor " << to_double(audit.floor);
  }
}

TEST(Extraction, SinglePhaseAmplitude) {
  const Basis b(Picture::phase, 3, 1);
  const Algorithm alg(b, QuantumState::basis_state(b, b.phase_index(1, 0)).amplitudes,
                      {Unitary::dense(Matrix::Identity(6, 6))});
  const auto m = Measurement::standard({1, 0, 1, 1, 1, 1}, 2);
  const auto ex = extract_polynomials(alg, m);
  ASSERT_EQ(ex.outcomes[0].size(), 1U);
  const auto& q = ex.outcomes[0][0];
  for (std::size_t r = 0; r < q.term_count(); ++r) {
    const Complex expected = q.subset_at(r) == SubsetMask::from_elements({1}) ? 1.0 : 0.0;
    EXPECT_LT(std::abs(q.coefficients()[r] - expected), 1e-15);
  }
  EXPECT_TRUE(ex.certified());
  EXPECT_LT(ex.max_reconstruction_error, 1e-12);
}

TEST(Extraction, CharacterDistinguisherHasUnitModulus) {
  const auto bundle = build_character_distinguisher(2);
  const auto ex = extract_polynomials(bundle.algorithm, bundle.measurement);
  EXPECT_TRUE(ex.certified());
  for (std::size_t a = 0; a < bundle.family.size(); ++a) {
    ASSERT_GE(ex.outcomes[a].size(), 1U);  // outcome 0 also holds the symmetric labels
    EXPECT_NEAR(std::abs(evaluate_poly(ex.outcomes[a][0], bundle.family[a])), 1.0, 1e-12);
  }
}

TEST(Extraction, RandomTwoQueryDegreeCertificate) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const Basis b(t % 2 ? Picture::bitflip : Picture::phase, 4, 1 + t % 3);
    const auto alg = random_algorithm(b, 2, rng);
    const auto ex = extract_polynomials(alg, random_measurement(b.dim(), 3, rng));
    EXPECT_EQ(ex.degree_cap, 2);
    EXPECT_LE(ex.max_high_degree_coefficient, 1e-10);
    EXPECT_LT(ex.max_reconstruction_error, 1e-10);
  }
}

TEST(Extraction, GlobalSumIsOne) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 5; ++t) {
    const Basis b(Picture::bitflip, 3, 2);
    const auto alg = random_algorithm(b, 1 + t % 3, rng);
    const auto ex = extract_polynomials(alg, random_measurement(b.dim(), 4, rng));
    double total = 0.0;
    for (const auto& outcome : ex.outcomes) {
      for (const auto& q : outcome) total += parseval(q);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Extraction, CapacityGuard) {
  const Basis b(Picture::phase, 17, 1);
  Vector s = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
  s(0) = 1.0;
  const Algorithm alg(b, s, {Unitary::permutation([&] {
                        std::vector<std::size_t> id(b.dim());
                        for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
                        return id;
                      }())});
  EXPECT_THROW(extract_polynomials(alg, Measurement::standard(std::vector<std::size_t>(b.dim(), 0), 1)),
               CapacityError);
}
