#pragma once

// Dense helpers: Hermitian generators from real parameter vectors,
// exp(iH), unitary logarithms and Haar-ish random unitaries.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <random>

#include "qql/errors.hpp"
#include "qql/simulator.hpp"

namespace qql {

/// Parameter layout for a d x d Hermitian H from d^2 reals:
///   theta[a*d + a]           = H_aa
///   theta[a*d + b], a < b    = Re H_ab
///   theta[b*d + a], a < b    = Im H_ab
inline Matrix hermitian_from_params(const Eigen::VectorXd& theta, Eigen::Index d) {
  if (theta.size() != d * d) throw ModelError("generator needs d^2 parameters");
  Matrix h(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    h(a, a) = theta(a * d + a);
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const Complex z(theta(a * d + b), theta(b * d + a));
      h(a, b) = z;
      h(b, a) = std::conj(z);
    }
  }
  return h;
}

inline Eigen::VectorXd params_from_hermitian(const Matrix& h) {
  const Eigen::Index d = h.rows();
  Eigen::VectorXd theta(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    theta(a * d + a) = h(a, a).real();
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const Complex z = 0.5 * (h(a, b) + std::conj(h(b, a)));
      theta(a * d + b) = z.real();
      theta(b * d + a) = z.imag();
    }
  }
  return theta;
}

/// H = U diag(lambda) U^dagger together with exp(iH).
struct HermitianExp {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
  Matrix value;  // exp(iH)

  explicit HermitianExp(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw ValidationError("Hermitian eigensolver failed");
    eigenvalues = es.eigenvalues();
    eigenvectors = es.eigenvectors();
    Vector phases(eigenvalues.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, eigenvalues(i));
    value = eigenvectors * phases.asDiagonal() * eigenvectors.adjoint();
  }

  /// Given G with df = Re<G, dV>, returns Gamma with df = Re<Gamma, dH>
  /// (divided differences of exp(i lambda)).
  Matrix pullback(const Matrix& g) const {
    const Eigen::Index d = eigenvalues.size();
    const Matrix a = eigenvectors.adjoint() * g * eigenvectors;
    Matrix weighted(d, d);
    for (Eigen::Index p = 0; p < d; ++p) {
      for (Eigen::Index q = 0; q < d; ++q) {
        const double lp = eigenvalues(p);
        const double lq = eigenvalues(q);
        Complex phi;
        if (std::abs(lp - lq) < 1e-9) {
          phi = Complex(0.0, 1.0) * std::polar(1.0, 0.5 * (lp + lq));
        } else {
          phi = (std::polar(1.0, lp) - std::polar(1.0, lq)) / (lp - lq);
        }
        weighted(p, q) = std::conj(phi) * a(p, q);
      }
    }
    return eigenvectors * weighted * eigenvectors.adjoint();
  }
};

/// d df/dtheta from Gamma, matching hermitian_from_params.
inline Eigen::VectorXd params_gradient(const Matrix& gamma) {
  const Eigen::Index d = gamma.rows();
  Eigen::VectorXd g(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    g(a * d + a) = gamma(a, a).real();
    for (Eigen::Index b = a + 1; b < d; ++b) {
      g(a * d + b) = gamma(a, b).real() + gamma(b, a).real();
      g(b * d + a) = gamma(a, b).imag() - gamma(b, a).imag();
    }
  }
  return g;
}

/// Hermitian H with exp(iH) = U, eigenphases taken in (-pi, pi].
inline Matrix unitary_log(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) throw ValidationError("Schur decomposition failed");
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Vector phases(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) phases(i) = std::arg(t(i, i));
  Matrix h = q * phases.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

/// Unitary whose first column is the unit vector s (Householder reflection
/// times a phase).
inline Matrix unitary_with_first_column(const Vector& s) {
  const Eigen::Index d = s.size();
  const double ns = s.norm();
  if (std::abs(ns - 1.0) > 1e-10) throw ValidationError("vector must be normalized");
  const Complex alpha = std::abs(s(0)) > 0 ? s(0) / std::abs(s(0)) : Complex(1.0, 0.0);
  Vector e = Vector::Zero(d);
  e(0) = alpha;
  Vector v = e - s;
  Matrix reflect = Matrix::Identity(d, d);
  const double nv = v.norm();
  if (nv > 1e-14) {
    v /= nv;
    reflect -= 2.0 * v * v.adjoint();
  }
  Matrix phase = Matrix::Identity(d, d);
  phase(0, 0) = alpha;
  return reflect * phase;
}

/// Random unitary from the QR decomposition of a complex Gaussian matrix,
/// with the R-diagonal phases fixed so the law is Haar.
template <class Rng>
Matrix random_unitary(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rj = r(j, j);
    if (std::abs(rj) > 0) q.col(j) *= rj / std::abs(rj);
  }
  return q;
}

template <class Rng>
Vector random_state(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

}  // namespace qql
