#pragma once

// State-vector execution of k-query algorithms
//
//   |psi_F> = V_k F V_{k-1} ... V_1 F |s>
//
// in two pictures that share the dimension 2*N*W.
//
// Bit-flip picture: basis |x, q, w>, x = 1..N, q = +-1, w = 0..W-1; the
// oracle maps |x,q,w> to |x, q F(x), w>. Index = ((x-1)*2 + (q<0))*W + w.
//
// Phase picture: basis |p, w> with position p in 0..2N-1:
//   p = 0         |0>   = (|1,+1> + |1,-1>)/sqrt2
//   p = x (1..N)  |x>   = (|x,+1> - |x,-1>)/sqrt2
//   p = N+x-1     |0_x> = (|x,+1> + |x,-1>)/sqrt2 for x = 2..N
// The oracle multiplies |x> by F(x) and leaves |0>, |0_x> fixed.
// Index = p*W + w, so positions 0..N occupy the leading (N+1)*W entries.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qql/errors.hpp"
#include "qql/oracle.hpp"
#include "qql/walsh.hpp"

namespace qql {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kOrthoTol = 1e-12;

enum class Picture { bitflip, phase };

inline std::string to_string(Picture p) {
  return p == Picture::bitflip ? "bitflip" : "phase";
}

inline Picture picture_from_string(const std::string& s) {
  if (s == "bitflip") return Picture::bitflip;
  if (s == "phase") return Picture::phase;
  throw ValidationError("unknown picture '" + s + "'");
}

/// Labeled basis scheme: picture, domain size N and workspace size W.
struct Basis {
  Picture picture = Picture::phase;
  int domain_size = 1;
  int workspace = 1;

  Basis() = default;
  Basis(Picture pic, int n, int w) : picture(pic), domain_size(n), workspace(w) {
    detail::check_domain_size(n);
    if (w < 1) throw ParameterError("workspace size must be >= 1");
  }

  std::size_t dim() const {
    return 2 * static_cast<std::size_t>(domain_size) *
           static_cast<std::size_t>(workspace);
  }

  std::size_t bitflip_index(int x, int q, int w) const {
    return (static_cast<std::size_t>(x - 1) * 2 + (q < 0 ? 1 : 0)) *
               static_cast<std::size_t>(workspace) +
           static_cast<std::size_t>(w);
  }

  /// Index of phase label |x, w> for x = 0..N.
  std::size_t phase_index(int x, int w) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(workspace) +
           static_cast<std::size_t>(w);
  }

  /// Index of the auxiliary symmetric label |0_x, w> for x = 2..N.
  std::size_t auxiliary_index(int x, int w) const {
    return static_cast<std::size_t>(domain_size + x - 1) *
               static_cast<std::size_t>(workspace) +
           static_cast<std::size_t>(w);
  }

  /// Human-readable label of basis index i.
  std::string label(std::size_t i) const {
    const auto ws = static_cast<std::size_t>(workspace);
    const auto w = std::to_string(i % ws);
    const auto p = i / ws;
    if (picture == Picture::bitflip) {
      const auto x = p / 2 + 1;
      return "|" + std::to_string(x) + "," + (p % 2 ? "-1" : "+1") + "," + w + ">";
    }
    const auto n = static_cast<std::size_t>(domain_size);
    if (p <= n) return "|" + std::to_string(p) + "," + w + ">";
    return "|0_" + std::to_string(p - n + 1) + "," + w + ">";
  }

  friend bool operator==(const Basis&, const Basis&) = default;
};

struct QuantumState {
  Basis basis;
  Vector amplitudes;

  QuantumState(Basis b, Vector amps) : basis(b), amplitudes(std::move(amps)) {
    if (static_cast<std::size_t>(amplitudes.size()) != basis.dim()) {
      throw ModelError("state has " + std::to_string(amplitudes.size()) +
                       " amplitudes, basis dimension is " +
                       std::to_string(basis.dim()));
    }
  }

  static QuantumState basis_state(Basis b, std::size_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return QuantumState(b, std::move(v));
  }

  double norm() const { return amplitudes.norm(); }
};

// ---------------------------------------------------------------------------
// Unitaries. The contract is "a unitary matrix on the full space"; structured
// factors avoid materializing (N+1)2^N-dimensional permutations and
// transforms.

/// Dense matrix factor.
struct DenseFactor {
  Matrix matrix;
};

/// Basis permutation: the amplitude at index i moves to image[i].
struct PermutationFactor {
  std::vector<std::size_t> image;
};

/// Normalized Walsh-Hadamard transform on the workspace index w of every
/// block of `width` consecutive entries.
struct WorkspaceWalshFactor {
  std::size_t width = 1;
};

using Factor = std::variant<DenseFactor, PermutationFactor, WorkspaceWalshFactor>;

class Unitary {
 public:
  /// Identity of the given dimension.
  explicit Unitary(std::size_t dim = 0) : dim_(dim) {}

  static Unitary dense(Matrix m) {
    if (m.rows() != m.cols()) throw ModelError("unitary must be square");
    Unitary u(static_cast<std::size_t>(m.rows()));
    u.factors_.emplace_back(DenseFactor{std::move(m)});
    return u;
  }

  static Unitary permutation(std::vector<std::size_t> image) {
    std::vector<bool> hit(image.size(), false);
    for (auto t : image) {
      if (t >= image.size() || hit[t]) {
        throw ValidationError("permutation image is not a bijection");
      }
      hit[t] = true;
    }
    Unitary u(image.size());
    u.factors_.emplace_back(PermutationFactor{std::move(image)});
    return u;
  }

  static Unitary workspace_walsh(std::size_t dim, std::size_t width) {
    if (width == 0 || !std::has_single_bit(width) || dim % width != 0) {
      throw ValidationError("workspace transform width must be a power of two dividing the dimension");
    }
    Unitary u(dim);
    u.factors_.emplace_back(WorkspaceWalshFactor{width});
    return u;
  }

  /// `next` applied after *this.
  Unitary then(const Unitary& next) const {
    if (next.dim_ != dim_) throw ModelError("composing unitaries of different dimension");
    Unitary u = *this;
    u.factors_.insert(u.factors_.end(), next.factors_.begin(), next.factors_.end());
    return u;
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Factor>& factors() const { return factors_; }

  void apply(Vector& v) const {
    if (static_cast<std::size_t>(v.size()) != dim_) {
      throw ModelError("unitary of dimension " + std::to_string(dim_) +
                       " applied to vector of length " + std::to_string(v.size()));
    }
    for (const auto& f : factors_) {
      std::visit([&v](const auto& factor) { apply_factor(factor, v); }, f);
    }
  }

  Matrix to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    if (factors_.size() == 1) {
      if (const auto* d = std::get_if<DenseFactor>(&factors_.front())) return d->matrix;
    }
    Matrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      Vector e = Vector::Zero(n);
      e(c) = 1.0;
      apply(e);
      out.col(c) = e;
    }
    return out;
  }

  /// max |(V^dagger V - I)_ij| over the dense factors. Permutations and
  /// Walsh factors are exactly unitary.
  double unitarity_defect() const {
    double worst = 0.0;
    for (const auto& f : factors_) {
      if (const auto* d = std::get_if<DenseFactor>(&f)) {
        const auto n = d->matrix.rows();
        const Matrix g = d->matrix.adjoint() * d->matrix - Matrix::Identity(n, n);
        worst = std::max(worst, g.cwiseAbs().maxCoeff());
      }
    }
    return worst;
  }

 private:
  static void apply_factor(const DenseFactor& f, Vector& v) {
    if (f.matrix.rows() != v.size()) throw ModelError("dense factor dimension mismatch");
    v = f.matrix * v;
  }
  static void apply_factor(const PermutationFactor& f, Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < f.image.size(); ++i) {
      out(static_cast<Eigen::Index>(f.image[i])) = v(static_cast<Eigen::Index>(i));
    }
    v.swap(out);
  }
  static void apply_factor(const WorkspaceWalshFactor& f, Vector& v) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(f.width));
    const auto blocks = static_cast<std::size_t>(v.size()) / f.width;
    for (std::size_t b = 0; b < blocks; ++b) {
      std::span<Complex> block(v.data() + b * f.width, f.width);
      walsh_hadamard(block);
    }
    v *= scale;
  }

  std::size_t dim_;
  std::vector<Factor> factors_;
};

/// Initial state plus V_1..V_k on a common basis.
class Algorithm {
 public:
  Algorithm(Basis basis, Vector initial, std::vector<Unitary> unitaries)
      : basis_(basis), initial_(std::move(initial)), unitaries_(std::move(unitaries)) {
    if (unitaries_.empty()) throw ValidationError("algorithm needs k >= 1 queries");
    if (static_cast<std::size_t>(initial_.size()) != basis_.dim()) {
      throw ModelError("initial state length " + std::to_string(initial_.size()) +
                       " does not match basis dimension " + std::to_string(basis_.dim()));
    }
    if (std::abs(initial_.norm() - 1.0) > kNormTol) {
      throw ValidationError("initial state is not normalized");
    }
    for (std::size_t i = 0; i < unitaries_.size(); ++i) {
      if (unitaries_[i].dim() != basis_.dim()) {
        throw ModelError("V_" + std::to_string(i + 1) + " has dimension " +
                         std::to_string(unitaries_[i].dim()) + ", expected " +
                         std::to_string(basis_.dim()));
      }
      const double defect = unitaries_[i].unitarity_defect();
      if (defect > kUnitarityTol) {
        throw ValidationError("V_" + std::to_string(i + 1) +
                              " is not unitary (defect " + std::to_string(defect) + ")");
      }
    }
  }

  const Basis& basis() const { return basis_; }
  std::size_t dim() const { return basis_.dim(); }
  int k() const { return static_cast<int>(unitaries_.size()); }
  const Vector& initial() const { return initial_; }
  const std::vector<Unitary>& unitaries() const { return unitaries_; }

 private:
  Basis basis_;
  Vector initial_;
  std::vector<Unitary> unitaries_;
};

/// Projective measurement given as an orthonormal basis of the full space
/// partitioned into D outcome subspaces. `basis` is either the standard
/// basis (not stored) or a dense unitary whose columns are the vectors.
class Measurement {
 public:
  /// Outcome l is spanned by outcomes[l]; all vectors together must form an
  /// orthonormal basis of C^dim.
  Measurement(std::size_t dim, const std::vector<std::vector<Vector>>& outcomes)
      : dim_(dim), outcome_count_(outcomes.size()) {
    if (outcomes.empty()) throw ValidationError("measurement needs at least one outcome");
    std::size_t total = 0;
    for (const auto& o : outcomes) total += o.size();
    if (total != dim) {
      throw ValidationError("measurement subspaces have total dimension " +
                            std::to_string(total) + ", space has dimension " +
                            std::to_string(dim));
    }
    Matrix b(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    labels_.reserve(dim);
    Eigen::Index col = 0;
    for (std::size_t l = 0; l < outcomes.size(); ++l) {
      for (const auto& v : outcomes[l]) {
        if (static_cast<std::size_t>(v.size()) != dim) {
          throw ModelError("measurement vector has wrong length");
        }
        b.col(col++) = v;
        labels_.push_back(l);
      }
    }
    const Matrix g = b.adjoint() * b - Matrix::Identity(b.rows(), b.cols());
    const double defect = g.cwiseAbs().maxCoeff();
    if (defect > kOrthoTol) {
      throw ValidationError("measurement vectors are not orthonormal (defect " +
                            std::to_string(defect) + ")");
    }
    basis_ = std::move(b);
  }

  /// Standard-basis measurement: basis index i belongs to outcome labels[i].
  static Measurement standard(std::vector<std::size_t> labels, std::size_t outcome_count) {
    if (outcome_count == 0) throw ValidationError("measurement needs at least one outcome");
    for (auto l : labels) {
      if (l >= outcome_count) throw ValidationError("measurement label out of range");
    }
    Measurement m;
    m.dim_ = labels.size();
    m.outcome_count_ = outcome_count;
    m.labels_ = std::move(labels);
    return m;
  }

  std::size_t dim() const { return dim_; }
  std::size_t outcome_count() const { return outcome_count_; }
  bool is_standard_basis() const { return !basis_.has_value(); }
  const std::vector<std::size_t>& labels() const { return labels_; }

  std::size_t subspace_dimension(std::size_t outcome) const {
    std::size_t m = 0;
    for (auto l : labels_) m += (l == outcome);
    return m;
  }

  /// Basis-vector indices belonging to the outcome, in basis order.
  std::vector<std::size_t> members(std::size_t outcome) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == outcome) out.push_back(i);
    }
    return out;
  }

  Vector basis_vector(std::size_t i) const {
    if (basis_) return basis_->col(static_cast<Eigen::Index>(i));
    Vector e = Vector::Zero(static_cast<Eigen::Index>(dim_));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    return e;
  }

  /// Dense matrix whose columns are the basis vectors.
  Matrix basis_matrix() const {
    if (basis_) return *basis_;
    const auto n = static_cast<Eigen::Index>(dim_);
    return Matrix::Identity(n, n);
  }

  /// Coordinates <b_i|psi> of a state in the measurement basis.
  Vector coordinates(const Vector& psi) const {
    if (static_cast<std::size_t>(psi.size()) != dim_) {
      throw ModelError("state dimension does not match measurement");
    }
    if (basis_) return basis_->adjoint() * psi;
    return psi;
  }

 private:
  Measurement() = default;

  std::size_t dim_ = 0;
  std::size_t outcome_count_ = 0;
  std::vector<std::size_t> labels_;
  std::optional<Matrix> basis_;
};

// ---------------------------------------------------------------------------
// Oracles

namespace detail {

inline void check_oracle_domain(const Basis& b, const BooleanFunction& f) {
  if (f.domain_size() != b.domain_size) {
    throw ModelError("function domain size " + std::to_string(f.domain_size()) +
                     " does not match basis domain size " +
                     std::to_string(b.domain_size));
  }
}

inline void bitflip_oracle_in_place(const Basis& b, std::uint64_t mask, Vector& v) {
  const auto ws = static_cast<Eigen::Index>(b.workspace);
  for (int x = 1; x <= b.domain_size; ++x) {
    if (!((mask >> (x - 1)) & 1U)) continue;
    const auto plus = static_cast<Eigen::Index>(b.bitflip_index(x, 1, 0));
    v.segment(plus, ws).swap(v.segment(plus + ws, ws));
  }
}

inline void phase_oracle_in_place(const Basis& b, std::uint64_t mask, Vector& v) {
  const auto ws = static_cast<Eigen::Index>(b.workspace);
  for (int x = 1; x <= b.domain_size; ++x) {
    if (!((mask >> (x - 1)) & 1U)) continue;
    v.segment(static_cast<Eigen::Index>(b.phase_index(x, 0)), ws) *= -1.0;
  }
}

inline void oracle_in_place(const Basis& b, std::uint64_t mask, Vector& v) {
  if (b.picture == Picture::bitflip) {
    bitflip_oracle_in_place(b, mask, v);
  } else {
    phase_oracle_in_place(b, mask, v);
  }
}

}  // namespace detail

/// |x,q,w> -> |x, q F(x), w>.
inline QuantumState apply_oracle_bitflip(const QuantumState& state, const BooleanFunction& f) {
  if (state.basis.picture != Picture::bitflip) {
    throw ModelError("bit-flip oracle applied to a phase-picture state");
  }
  detail::check_oracle_domain(state.basis, f);
  QuantumState out = state;
  detail::bitflip_oracle_in_place(out.basis, f.mask(), out.amplitudes);
  return out;
}

/// |x,w> -> F(x)|x,w>; |0> and |0_x> are left unchanged.
inline QuantumState apply_oracle_phase(const QuantumState& state, const BooleanFunction& f) {
  if (state.basis.picture != Picture::phase) {
    throw ModelError("phase oracle applied to a bit-flip-picture state");
  }
  detail::check_oracle_domain(state.basis, f);
  QuantumState out = state;
  detail::phase_oracle_in_place(out.basis, f.mask(), out.amplitudes);
  return out;
}

inline QuantumState apply_oracle(const QuantumState& state, const BooleanFunction& f) {
  return state.basis.picture == Picture::bitflip ? apply_oracle_bitflip(state, f)
                                                 : apply_oracle_phase(state, f);
}

// ---------------------------------------------------------------------------
// Picture conversion

namespace detail {

inline Vector bitflip_to_phase(const Basis& b, const Vector& v) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector out(v.size());
  for (int x = 1; x <= b.domain_size; ++x) {
    for (int w = 0; w < b.workspace; ++w) {
      const Complex plus = v(static_cast<Eigen::Index>(b.bitflip_index(x, 1, w)));
      const Complex minus = v(static_cast<Eigen::Index>(b.bitflip_index(x, -1, w)));
      out(static_cast<Eigen::Index>(b.phase_index(x, w))) = r * (plus - minus);
      const auto sym = x == 1 ? b.phase_index(0, w) : b.auxiliary_index(x, w);
      out(static_cast<Eigen::Index>(sym)) = r * (plus + minus);
    }
  }
  return out;
}

inline Vector phase_to_bitflip(const Basis& b, const Vector& v) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector out(v.size());
  for (int x = 1; x <= b.domain_size; ++x) {
    for (int w = 0; w < b.workspace; ++w) {
      const Complex anti = v(static_cast<Eigen::Index>(b.phase_index(x, w)));
      const auto sym_index = x == 1 ? b.phase_index(0, w) : b.auxiliary_index(x, w);
      const Complex sym = v(static_cast<Eigen::Index>(sym_index));
      out(static_cast<Eigen::Index>(b.bitflip_index(x, 1, w))) = r * (sym + anti);
      out(static_cast<Eigen::Index>(b.bitflip_index(x, -1, w))) = r * (sym - anti);
    }
  }
  return out;
}

inline Basis with_picture(Basis b, Picture p) {
  b.picture = p;
  return b;
}

}  // namespace detail

/// Change of orthonormal basis between the two pictures (identity when the
/// state is already in the target picture).
inline QuantumState convert_picture(const QuantumState& state, Picture target) {
  if (state.basis.picture == target) return state;
  const Basis nb = detail::with_picture(state.basis, target);
  if (target == Picture::phase) {
    return QuantumState(nb, detail::bitflip_to_phase(state.basis, state.amplitudes));
  }
  return QuantumState(nb, detail::phase_to_bitflip(state.basis, state.amplitudes));
}

/// Dense matrix C with C * (source amplitudes) = target amplitudes.
inline Matrix picture_change_matrix(const Basis& source, Picture target) {
  const auto n = static_cast<Eigen::Index>(source.dim());
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto e = QuantumState::basis_state(source, static_cast<std::size_t>(i));
    c.col(i) = convert_picture(e, target).amplitudes;
  }
  return c;
}

/// Conjugates every V_i by the change of basis.
inline Algorithm convert_picture(const Algorithm& alg, Picture target) {
  if (alg.basis().picture == target) return alg;
  const Matrix c = picture_change_matrix(alg.basis(), target);
  std::vector<Unitary> us;
  us.reserve(alg.unitaries().size());
  for (const auto& u : alg.unitaries()) {
    us.push_back(Unitary::dense(c * u.to_dense() * c.adjoint()));
  }
  return Algorithm(detail::with_picture(alg.basis(), target), c * alg.initial(), std::move(us));
}

/// Rotates every measurement vector into the target picture.
inline Measurement convert_picture(const Measurement& m, const Basis& source, Picture target) {
  if (source.picture == target) return m;
  std::vector<std::vector<Vector>> outcomes(m.outcome_count());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const QuantumState v(source, m.basis_vector(i));
    outcomes[m.labels()[i]].push_back(convert_picture(v, target).amplitudes);
  }
  return Measurement(m.dim(), outcomes);
}

// ---------------------------------------------------------------------------
// Execution and measurement

/// Amplitudes of V_k F ... V_1 F |s> (oracle first).
inline Vector run_amplitudes(const Algorithm& alg, const BooleanFunction& f) {
  detail::check_oracle_domain(alg.basis(), f);
  Vector v = alg.initial();
  for (const auto& u : alg.unitaries()) {
    detail::oracle_in_place(alg.basis(), f.mask(), v);
    u.apply(v);
  }
  return v;
}

inline QuantumState run(const Algorithm& alg, const BooleanFunction& f) {
  return QuantumState(alg.basis(), run_amplitudes(alg, f));
}

inline std::vector<double> outcome_probabilities(const Vector& psi, const Measurement& m) {
  const Vector c = m.coordinates(psi);
  std::vector<double> p(m.outcome_count(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    p[m.labels()[i]] += std::norm(c(static_cast<Eigen::Index>(i)));
  }
  return p;
}

inline std::vector<double> outcome_probabilities(const QuantumState& state, const Measurement& m) {
  return outcome_probabilities(state.amplitudes, m);
}

/// probabilities(l, j) = ||P_l psi_{F_j}||^2.
struct SuccessMatrix {
  Eigen::MatrixXd probabilities;

  std::size_t size() const { return static_cast<std::size_t>(probabilities.cols()); }
  Eigen::VectorXd diagonal() const { return probabilities.diagonal(); }
  double worst_case_success() const { return probabilities.diagonal().minCoeff(); }
};

inline SuccessMatrix success_matrix(const Algorithm& alg, const Measurement& m,
                                    const FunctionFamily& fam) {
  if (m.outcome_count() != fam.size()) {
    throw ValidationError("measurement has " + std::to_string(m.outcome_count()) +
                          " outcomes, family has " + std::to_string(fam.size()) +
                          " members");
  }
  if (m.dim() != alg.dim()) throw ModelError("measurement dimension does not match algorithm");
  if (fam.domain_size() != alg.basis().domain_size) {
    throw ModelError("family domain size does not match algorithm");
  }
  const auto d = static_cast<Eigen::Index>(fam.size());
  SuccessMatrix out{Eigen::MatrixXd::Zero(d, d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto p = outcome_probabilities(run_amplitudes(alg, fam[static_cast<std::size_t>(j)]), m);
    for (Eigen::Index l = 0; l < d; ++l) out.probabilities(l, j) = p[static_cast<std::size_t>(l)];
  }
  return out;
}

}  // namespace qql
