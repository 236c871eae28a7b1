#pragma once

// Pretty-good (square-root) measurement for an ensemble of pure states
// with uniform prior:
//
//   rho = sum_j |psi_j><psi_j|,   E_j = rho^{-1/2} |psi_j><psi_j| rho^{-1/2}
//
// plus the projector onto ker(rho) added to E_0. The success probability
// <psi_j|E_j|psi_j> equals ((G^{1/2})_jj)^2 with G the Gram matrix, which is
// how the optimizer evaluates it.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qql/errors.hpp"
#include "qql/simulator.hpp"

namespace qql {

inline constexpr double kPseudoInverseCutoff = 1e-12;

namespace detail {

inline Matrix states_as_columns(const std::vector<Vector>& states) {
  if (states.empty()) throw ValidationError("ensemble needs at least one state");
  const Eigen::Index d = states.front().size();
  Matrix psi(d, static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j].size() != d) throw ModelError("ensemble states have different dimensions");
    psi.col(static_cast<Eigen::Index>(j)) = states[j];
  }
  return psi;
}

/// Square roots of Gram eigenvalues, with eigenvalues at roundoff level set
/// to zero. The final states of a k-query algorithm span at most M(N,k)
/// dimensions, so exact zeros are common and sqrt(1e-16) noise would leak
/// 1e-8 errors into the successes.
inline Eigen::VectorXd gram_roots(const Eigen::VectorXd& eigenvalues) {
  const double cut = kPseudoInverseCutoff * std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  Eigen::VectorXd root(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    root(i) = eigenvalues(i) > cut ? std::sqrt(eigenvalues(i)) : 0.0;
  }
  return root;
}

}  // namespace detail

/// The D positive operators E_j, summing to the identity.
inline std::vector<Matrix> pretty_good_measurement(const std::vector<Vector>& states) {
  const Matrix psi = detail::states_as_columns(states);
  const Eigen::Index d = psi.rows();
  const Matrix rho = psi * psi.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const auto& lambda = es.eigenvalues();
  const auto& u = es.eigenvectors();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());

  Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd kernel = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (lambda(i) > kPseudoInverseCutoff * scale) {
      inv_sqrt(i) = 1.0 / std::sqrt(lambda(i));
    } else {
      kernel(i) = 1.0;
    }
  }
  const Matrix rho_inv_sqrt = u * inv_sqrt.cast<Complex>().asDiagonal() * u.adjoint();
  const Matrix complement = u * kernel.cast<Complex>().asDiagonal() * u.adjoint();

  std::vector<Matrix> ops;
  ops.reserve(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    const Vector mu = rho_inv_sqrt * states[j];
    ops.push_back(mu * mu.adjoint());
  }
  ops.front() += complement;
  return ops;
}

/// <psi_j|E_j|psi_j> via the square root of the Gram matrix.
inline std::vector<double> pgm_success(const std::vector<Vector>& states) {
  const Matrix psi = detail::states_as_columns(states);
  const Matrix gram = psi.adjoint() * psi;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const Eigen::VectorXd root = detail::gram_roots(es.eigenvalues());
  const Matrix r = es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  std::vector<double> out(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    const double rjj = r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
    out[j] = rjj * rjj;
  }
  return out;
}

/// For linearly independent states the PGM is projective: the vectors
/// rho^{-1/2} psi_j are orthonormal. Returns that measurement, with an
/// orthonormal completion of the span assigned to outcome 0.
inline Measurement pgm_measurement(const std::vector<Vector>& states) {
  const Matrix psi = detail::states_as_columns(states);
  const Eigen::Index d = psi.rows();
  const auto count = static_cast<Eigen::Index>(states.size());
  if (count > d) throw ValidationError("more states than dimensions; PGM is not projective");
  const Matrix gram = psi.adjoint() * psi;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.eigenvalues().minCoeff() <= kPseudoInverseCutoff * std::max(1.0, es.eigenvalues().maxCoeff())) {
    throw ValidationError("states are linearly dependent; PGM is not projective");
  }
  // psi G^{-1/2} is the polar factor U V^dagger of psi = U S V^dagger; the
  // SVD route keeps the columns orthonormal to working precision.
  Eigen::JacobiSVD<Matrix> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix mu = svd.matrixU() * svd.matrixV().adjoint();

  // Complete to a basis: QR of [mu | I] keeps the first `count` directions.
  Matrix stacked(d, count + d);
  stacked << mu, Matrix::Identity(d, d);
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);

  std::vector<std::vector<Vector>> outcomes(states.size());
  for (Eigen::Index j = 0; j < count; ++j) outcomes[static_cast<std::size_t>(j)].push_back(mu.col(j));
  for (Eigen::Index j = count; j < d; ++j) outcomes.front().push_back(q.col(j));
  return Measurement(static_cast<std::size_t>(d), outcomes);
}

}  // namespace qql
