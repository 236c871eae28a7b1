#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace qql;

namespace {

std::vector<Vector> random_states(Eigen::Index d, std::size_t count, std::mt19937_64& rng) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_state(d, rng));
  return out;
}

double sum_defect(const std::vector<Matrix>& ops) {
  Matrix sum = Matrix::Zero(ops.front().rows(), ops.front().cols());
  for (const auto& e : ops) sum += e;
  return (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(PrettyGoodMeasurement, OrthonormalStatesGiveProjectors) {
  const Matrix u = [] {
    std::mt19937_64 rng(1);
    return random_unitary(5, rng);
  }();
  std::vector<Vector> states;
  for (Eigen::Index j = 0; j < 3; ++j) states.push_back(u.col(j));
  const auto ops = pretty_good_measurement(states);
  EXPECT_LT(sum_defect(ops), 1e-10);
  // E_1 and E_2 are exactly the rank-one projectors; E_0 also carries the
  // complement of the span.
  for (std::size_t j = 1; j < 3; ++j) {
    EXPECT_LT((ops[j] - states[j] * states[j].adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Matrix complement = u.col(3) * u.col(3).adjoint() + u.col(4) * u.col(4).adjoint();
  EXPECT_LT((ops[0] - states[0] * states[0].adjoint() - complement).cwiseAbs().maxCoeff(), 1e-12);
  for (double s : pgm_success(states)) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(PrettyGoodMeasurement, IdenticalStatesSplitEvenly) {
  std::mt19937_64 rng(2);
  const Vector v = random_state(4, rng);
  const std::vector<Vector> states = {v, v};
  for (double s : pgm_success(states)) EXPECT_NEAR(s, 0.5, 1e-12);
  const auto ops = pretty_good_measurement(states);
  EXPECT_LT(sum_defect(ops), 1e-10);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(v.dot(ops[j] * v).real(), 0.5, 1e-12);
}

TEST(PrettyGoodMeasurement, CompleteAndPositive) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 2 + t % 5;
    const auto states = random_states(d, 1 + static_cast<std::size_t>(t % 7), rng);
    const auto ops = pretty_good_measurement(states);
    EXPECT_LT(sum_defect(ops), 1e-10);
    for (const auto& e : ops) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(e);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    }
  }
}

TEST(PrettyGoodMeasurement, GramRouteMatchesOperatorRoute) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto states = random_states(6, 1 + static_cast<std::size_t>(t % 9), rng);
    const auto ops = pretty_good_measurement(states);
    const auto gram = pgm_success(states);
    for (std::size_t j = 0; j < states.size(); ++j) {
      EXPECT_NEAR(states[j].dot(ops[j] * states[j]).real(), gram[j], 1e-10);
    }
  }
}

TEST(PgmMeasurement, ProjectiveVersionAgrees) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto states = random_states(7, 2 + static_cast<std::size_t>(t % 5), rng);
    const auto m = pgm_measurement(states);
    const auto gram = pgm_success(states);
    for (std::size_t j = 0; j < states.size(); ++j) {
      EXPECT_NEAR(outcome_probabilities(states[j], m)[j], gram[j], 1e-10);
    }
  }
}

TEST(PgmMeasurement, RejectsDependentOrTooMany) {
  std::mt19937_64 rng(6);
  const Vector v = random_state(3, rng);
  EXPECT_THROW(pgm_measurement({v, v}), ValidationError);
  EXPECT_THROW(pgm_measurement(random_states(2, 3, rng)), ValidationError);
}

TEST(PrettyGoodMeasurement, CharacterDistinguisherIsExact) {
  const auto bundle = build_character_distinguisher(2);
  std::vector<Vector> finals;
  for (const auto& f : bundle.family) finals.push_back(run_amplitudes(bundle.algorithm, f));
  for (double s : pgm_success(finals)) EXPECT_NEAR(s, 1.0, 1e-12);
  const auto sm = success_matrix(bundle.algorithm, pgm_measurement(finals), bundle.family);
  EXPECT_LT((sm.probabilities - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}
