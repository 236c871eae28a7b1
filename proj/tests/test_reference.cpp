#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace qql;

TEST(PredictedSuccess, Values) {
  EXPECT_EQ(predicted_success(3, 2), Rational(7, 8));
  for (int n = 1; n <= 12; ++n) {
    EXPECT_EQ(predicted_success(n, n), Rational(1));
    EXPECT_EQ(predicted_success(n, 0), Rational(1, BigInt(1) << n));
  }
  EXPECT_THROW(predicted_success(3, 4), ParameterError);
}

TEST(CharacterDistinguisher, FinalStatesAreOrthonormal) {
  const auto bundle = build_character_distinguisher(2);
  const auto& fam = bundle.family;
  Matrix states(static_cast<Eigen::Index>(bundle.algorithm.dim()), static_cast<Eigen::Index>(fam.size()));
  for (std::size_t a = 0; a < fam.size(); ++a) {
    states.col(static_cast<Eigen::Index>(a)) = run_amplitudes(bundle.algorithm, fam[a]);
  }
  const Matrix gram = states.adjoint() * states;
  EXPECT_LT((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);

  // Before V1 the states f_a|s> are already orthogonal.
  const Basis& b = bundle.algorithm.basis();
  for (std::size_t a = 0; a < fam.size(); ++a) {
    for (std::size_t c = a + 1; c < fam.size(); ++c) {
      const QuantumState s(b, bundle.algorithm.initial());
      const Complex ip = apply_oracle(s, fam[a]).amplitudes.dot(apply_oracle(s, fam[c]).amplitudes);
      EXPECT_LT(std::abs(ip), 1e-12);
    }
  }
}

TEST(CharacterDistinguisher, IdentitySuccessMatrix) {
  for (int n = 1; n <= 6; ++n) {
    const auto bundle = build_character_distinguisher(n);
    const auto sm = success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
    const auto d = static_cast<Eigen::Index>(bundle.family.size());
    EXPECT_LT((sm.probabilities - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12) << n;
    EXPECT_EQ(bundle.predicted_success, Rational(1));
    // D = N + 1 = M(N, 1).
    EXPECT_EQ(BigInt(d), m_sum(static_cast<std::uint64_t>(bundle.family.domain_size()), 1));
  }
  EXPECT_THROW(build_character_distinguisher(0), ParameterError);
  EXPECT_THROW(build_character_distinguisher(7), ParameterError);
}

TEST(UniformSubset, ThreeTwoIsSevenEighths) {
  const auto bundle = build_uniform_subset_algorithm(3, 2);
  EXPECT_EQ(bundle.predicted_success, Rational(7, 8));
  const auto sm = success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
  for (Eigen::Index j = 0; j < 8; ++j) EXPECT_NEAR(sm.probabilities(j, j), 0.875, 1e-12);
}

TEST(UniformSubset, FullQueriesAreExact) {
  const auto bundle = build_uniform_subset_algorithm(3, 3);
  const auto sm = success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
  EXPECT_LT((sm.probabilities - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UniformSubset, FourTwoIsElevenSixteenths) {
  const auto bundle = build_uniform_subset_algorithm(4, 2);
  const auto sm = success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
  for (Eigen::Index j = 0; j < 16; ++j) EXPECT_NEAR(sm.probabilities(j, j), 11.0 / 16.0, 1e-12);
}

TEST(UniformSubset, EveryFunctionUpToSix) {
  for (int n = 1; n <= 6; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto bundle = build_uniform_subset_algorithm(n, k);
      const double p = to_double(bundle.predicted_success);
      const auto sm = success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
      ASSERT_LT((sm.diagonal().array() - p).abs().maxCoeff(), 1e-12) << n << "," << k;
      // D p = M(N, k).
      ASSERT_EQ(Rational(BigInt(1) << n) * bundle.predicted_success,
                Rational(m_sum(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k))));
    }
  }
}

TEST(UniformSubset, Errors) {
  EXPECT_THROW(build_uniform_subset_algorithm(13, 2), CapacityError);
  EXPECT_THROW(build_uniform_subset_algorithm(3, 0), ParameterError);
  EXPECT_THROW(build_uniform_subset_algorithm(3, 4), ParameterError);
}

TEST(Bundles, DegreeCertificate) {
  const auto c = build_character_distinguisher(3);
  EXPECT_TRUE(extract_polynomials(c.algorithm, c.measurement).certified());
  for (int k = 1; k <= 4; ++k) {
    const auto u = build_uniform_subset_algorithm(4, k);
    const auto ex = extract_polynomials(u.algorithm, u.measurement);
    EXPECT_EQ(ex.degree_cap, k);
    EXPECT_TRUE(ex.certified()) << k;
    EXPECT_LT(ex.max_reconstruction_error, 1e-12);
  }
}

TEST(Bundles, BitflipRouteAgrees) {
  for (int n = 1; n <= 2; ++n) {
    const auto bundle = build_character_distinguisher(n);
    const auto& b = bundle.algorithm.basis();
    const auto flip_alg = convert_picture(bundle.algorithm, Picture::bitflip);
    const auto flip_m = convert_picture(bundle.measurement, b, Picture::bitflip);
    const auto phase = success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
    const auto flip = success_matrix(flip_alg, flip_m, bundle.family);
    EXPECT_LT((phase.probabilities - flip.probabilities).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto u = build_uniform_subset_algorithm(3, 2);
  const auto flip = success_matrix(convert_picture(u.algorithm, Picture::bitflip),
                                   convert_picture(u.measurement, u.algorithm.basis(), Picture::bitflip), u.family);
  for (Eigen::Index j = 0; j < 8; ++j) EXPECT_NEAR(flip.probabilities(j, j), 0.875, 1e-12);
}
