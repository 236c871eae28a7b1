#pragma once

// Numerical search for the best worst-case success of k-query algorithms
// on a family.
//
// The search space is the reduced phase picture: labels |x, w> for
// x = 0..N, w = 0..W-1 (dimension d = (N+1)W), where the oracle is the
// diagonal F(x). The symmetric labels 0_x of the full picture are further
// +1-eigenvectors and carry nothing the |0, w> labels cannot; to_algorithm()
// embeds a result into the full 2NW-dimensional phase picture.
//
// V_i = exp(i H(theta_i)) for Hermitian H built from d^2 reals; the initial
// state is the first column of exp(i H(theta_0)). The measurement is the
// pretty-good measurement of the final states; the objective is a soft-min
// of the per-function successes whose temperature is annealed toward 0.
// Gradients are analytic (reverse mode through the circuit, the Gram-matrix
// square root and the exponential map) and are cross-checked against
// central differences in the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qql/bounds.hpp"
#include "qql/errors.hpp"
#include "qql/linalg.hpp"
#include "qql/oracle.hpp"
#include "qql/pgm.hpp"
#include "qql/simulator.hpp"

namespace qql {

inline constexpr int kMaxOptimizerDomain = 8;
inline constexpr int kMaxOptimizerQueries = 4;
inline constexpr int kMaxOptimizerWorkspace = 8;

/// Smallest power of two W with (N+1) W >= D.
inline int default_workspace(int domain_size, std::size_t family_size) {
  int w = 1;
  while (static_cast<std::size_t>(domain_size + 1) * static_cast<std::size_t>(w) < family_size) w *= 2;
  return w;
}

class ParamAlgorithm {
 public:
  ParamAlgorithm(int domain_size, int workspace, int queries, std::vector<Eigen::VectorXd> generators)
      : domain_size_(domain_size), workspace_(workspace), k_(queries), generators_(std::move(generators)) {
    detail::check_domain_size(domain_size);
    if (workspace < 1) throw ParameterError("workspace must be >= 1");
    if (queries < 1) throw ParameterError("need k >= 1 queries");
    if (generators_.size() != static_cast<std::size_t>(queries) + 1) {
      throw ModelError("need k + 1 generators (initial state plus V_1..V_k)");
    }
    const auto d = dim();
    for (const auto& g : generators_) {
      if (g.size() != d * d) throw ModelError("each generator needs d^2 parameters");
    }
  }

  static ParamAlgorithm zero(int domain_size, int workspace, int queries) {
    const auto d = static_cast<Eigen::Index>(domain_size + 1) * workspace;
    return ParamAlgorithm(domain_size, workspace, queries,
                          std::vector<Eigen::VectorXd>(static_cast<std::size_t>(queries) + 1,
                                                       Eigen::VectorXd::Zero(d * d)));
  }

  template <class Rng>
  static ParamAlgorithm random(int domain_size, int workspace, int queries, Rng& rng, double scale) {
    auto p = zero(domain_size, workspace, queries);
    std::normal_distribution<double> normal(0.0, scale);
    for (auto& g : p.generators_) {
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
    }
    return p;
  }

  /// Parameters realizing given reduced-space unitaries and initial state.
  static ParamAlgorithm from_unitaries(int domain_size, int workspace, const Vector& initial,
                                       const std::vector<Matrix>& unitaries) {
    std::vector<Eigen::VectorXd> gens;
    gens.push_back(params_from_hermitian(unitary_log(unitary_with_first_column(initial))));
    for (const auto& u : unitaries) gens.push_back(params_from_hermitian(unitary_log(u)));
    return ParamAlgorithm(domain_size, workspace, static_cast<int>(unitaries.size()), std::move(gens));
  }

  int domain_size() const { return domain_size_; }
  int workspace() const { return workspace_; }
  int k() const { return k_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(domain_size_ + 1) * workspace_; }
  std::size_t parameter_count() const { return generators_.size() * static_cast<std::size_t>(dim() * dim()); }

  /// Generator 0 makes the initial state, generator i (1..k) makes V_i.
  const std::vector<Eigen::VectorXd>& generators() const { return generators_; }

  Eigen::VectorXd flatten() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index off = 0;
    for (const auto& g : generators_) {
      out.segment(off, g.size()) = g;
      off += g.size();
    }
    return out;
  }

  ParamAlgorithm with_flat(const Eigen::VectorXd& flat) const {
    if (static_cast<std::size_t>(flat.size()) != parameter_count()) throw ModelError("wrong parameter count");
    ParamAlgorithm p = *this;
    Eigen::Index off = 0;
    for (auto& g : p.generators_) {
      g = flat.segment(off, g.size());
      off += g.size();
    }
    return p;
  }

  Matrix unitary(int i) const {
    return HermitianExp(hermitian_from_params(generators_.at(static_cast<std::size_t>(i)), dim())).value;
  }
  Vector initial_state() const { return unitary(0).col(0); }

  /// Full 2NW-dimensional phase-picture algorithm: V_i acts on the leading
  /// (N+1)W labels, identity on the symmetric labels 0_x.
  Algorithm to_algorithm() const {
    const Basis basis(Picture::phase, domain_size_, workspace_);
    const auto full = static_cast<Eigen::Index>(basis.dim());
    const auto d = dim();
    Vector s = Vector::Zero(full);
    s.head(d) = initial_state();
    std::vector<Unitary> us;
    for (int i = 1; i <= k_; ++i) {
      Matrix v = Matrix::Identity(full, full);
      v.topLeftCorner(d, d) = unitary(i);
      us.push_back(Unitary::dense(std::move(v)));
    }
    return Algorithm(basis, std::move(s), std::move(us));
  }

 private:
  int domain_size_;
  int workspace_;
  int k_;
  std::vector<Eigen::VectorXd> generators_;
};

struct ObjectiveEvaluation {
  double value = 0.0;
  double worst_case = 0.0;
  std::vector<double> successes;
  std::vector<Vector> final_states;
  Eigen::VectorXd gradient;  // empty unless requested
};

namespace detail {

/// Diagonal of the reduced-picture oracle for each family member.
inline std::vector<Eigen::VectorXd> reduced_oracle_signs(const FunctionFamily& fam, int workspace) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(fam.size());
  const int n = fam.domain_size();
  for (const auto& f : fam) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(n + 1) * workspace);
    for (int x = 0; x <= n; ++x) {
      s.segment(static_cast<Eigen::Index>(x) * workspace, workspace).setConstant(f(x));
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Soft-min -tau log(mean exp(-s/tau)) and its weights; tau <= 0 is the
/// plain minimum with the first argmin as subgradient.
inline double soft_min(const std::vector<double>& s, double tau, std::vector<double>& weights) {
  const double lo = *std::min_element(s.begin(), s.end());
  weights.assign(s.size(), 0.0);
  if (tau <= 0.0) {
    weights[static_cast<std::size_t>(std::min_element(s.begin(), s.end()) - s.begin())] = 1.0;
    return lo;
  }
  double z = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    weights[j] = std::exp(-(s[j] - lo) / tau);
    z += weights[j];
  }
  for (auto& w : weights) w /= z;
  return lo - tau * std::log(z / static_cast<double>(s.size()));
}

class ObjectiveEngine {
 public:
  ObjectiveEngine(const FunctionFamily& fam, int workspace)
      : signs_(reduced_oracle_signs(fam, workspace)) {}

  ObjectiveEvaluation evaluate(const ParamAlgorithm& p, double tau, bool want_gradient) const {
    const auto d = p.dim();
    const int k = p.k();
    const auto count = static_cast<Eigen::Index>(signs_.size());
    if (signs_.front().size() != d) throw ModelError("parameters do not match family/workspace");

    std::vector<HermitianExp> exps;
    exps.reserve(static_cast<std::size_t>(k) + 1);
    for (const auto& g : p.generators()) exps.emplace_back(hermitian_from_params(g, d));
    const Vector s = exps.front().value.col(0);

    // inputs[j][i] is the vector fed into V_{i+1} for function j.
    std::vector<std::vector<Vector>> inputs(signs_.size(), std::vector<Vector>(static_cast<std::size_t>(k)));
    Matrix psi(d, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      Vector x = s;
      for (int i = 0; i < k; ++i) {
        Vector y = signs_[static_cast<std::size_t>(j)].cast<Complex>().cwiseProduct(x);
        x = exps[static_cast<std::size_t>(i) + 1].value * y;
        inputs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = std::move(y);
      }
      psi.col(j) = x;
    }

    const Matrix gram = psi.adjoint() * psi;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Eigen::VectorXd root = gram_roots(es.eigenvalues());
    const Matrix& v = es.eigenvectors();
    const Matrix r = v * root.cast<Complex>().asDiagonal() * v.adjoint();

    ObjectiveEvaluation out;
    out.successes.resize(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) {
      const double rjj = r(j, j).real();
      out.successes[static_cast<std::size_t>(j)] = rjj * rjj;
    }
    std::vector<double> weights;
    out.value = soft_min(out.successes, tau, weights);
    out.worst_case = *std::min_element(out.successes.begin(), out.successes.end());
    out.final_states.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) out.final_states.emplace_back(psi.col(j));
    if (!want_gradient) return out;

    // d value = tr(C dR), C = diag(2 w_j R_jj); through R = G^{1/2} this is
    // tr(B dG) with B = V (L o V^dag C V) V^dag, L_ab = 1/(sqrt l_a + sqrt l_b).
    Eigen::VectorXd c(count);
    for (Eigen::Index j = 0; j < count; ++j) c(j) = 2.0 * weights[static_cast<std::size_t>(j)] * r(j, j).real();
    Matrix a = v.adjoint() * c.cast<Complex>().asDiagonal() * v;
    for (Eigen::Index p1 = 0; p1 < count; ++p1) {
      for (Eigen::Index q1 = 0; q1 < count; ++q1) {
        const double denom = root(p1) + root(q1);
        a(p1, q1) *= denom > 0.0 ? 1.0 / denom : 0.0;
      }
    }
    const Matrix b = v * a * v.adjoint();
    const Matrix grad_psi = 2.0 * psi * b;  // d value = Re<grad_psi, d psi>

    std::vector<Matrix> grad_v(static_cast<std::size_t>(k), Matrix::Zero(d, d));
    Vector grad_s = Vector::Zero(d);
    for (Eigen::Index j = 0; j < count; ++j) {
      Vector g = grad_psi.col(j);
      for (int i = k - 1; i >= 0; --i) {
        const auto& y = inputs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        grad_v[static_cast<std::size_t>(i)].noalias() += g * y.adjoint();
        g = exps[static_cast<std::size_t>(i) + 1].value.adjoint() * g;
        g = signs_[static_cast<std::size_t>(j)].cast<Complex>().cwiseProduct(g);
      }
      grad_s += g;
    }
    Matrix grad_u0 = Matrix::Zero(d, d);
    grad_u0.col(0) = grad_s;

    out.gradient.resize(static_cast<Eigen::Index>(p.parameter_count()));
    Eigen::Index off = 0;
    const auto block = d * d;
    out.gradient.segment(off, block) = params_gradient(exps.front().pullback(grad_u0));
    off += block;
    for (int i = 0; i < k; ++i) {
      out.gradient.segment(off, block) =
          params_gradient(exps[static_cast<std::size_t>(i) + 1].pullback(grad_v[static_cast<std::size_t>(i)]));
      off += block;
    }
    return out;
  }

 private:
  std::vector<Eigen::VectorXd> signs_;
};

}  // namespace detail

/// tau-soft-min of the PGM successes of the family's final states.
inline double objective(const ParamAlgorithm& params, const FunctionFamily& fam, double tau) {
  if (fam.domain_size() != params.domain_size()) throw ModelError("family domain does not match parameters");
  return detail::ObjectiveEngine(fam, params.workspace()).evaluate(params, tau, false).value;
}

inline ObjectiveEvaluation evaluate_objective(const ParamAlgorithm& params, const FunctionFamily& fam,
                                              double tau, bool want_gradient) {
  if (fam.domain_size() != params.domain_size()) throw ModelError("family domain does not match parameters");
  return detail::ObjectiveEngine(fam, params.workspace()).evaluate(params, tau, want_gradient);
}

struct OptimizerConfig {
  int restarts = 20;
  int max_iterations = 2000;
  double learning_rate = 0.05;
  double final_learning_rate = 1e-4;
  double tau_start = 0.05;
  double tau_end = 1e-5;
  /// Stop a restart once its best worst-case success has not improved by
  /// more than this over `patience` iterations.
  double tolerance = 1e-12;
  int patience = 400;
  /// Stop all restarts once the worst-case success is this close to the
  /// counting ceiling.
  double stop_gap = 1e-8;
  double init_scale = 1.0;
  std::uint64_t seed = 1;
  int workspace = 0;  // 0 picks default_workspace
  int threads = 1;
  /// Restarts are scheduled in fixed-size batches so early stopping does not
  /// depend on the thread count.
  int batch = 8;

  void validate() const {
    if (restarts < 1 || max_iterations < 1 || patience < 1 || batch < 1 || threads < 1) {
      throw ParameterError("optimizer counts must be positive");
    }
    if (!(learning_rate > 0) || !(final_learning_rate > 0) || !(tau_start > 0) || !(tau_end > 0) ||
        !(tolerance > 0) || !(stop_gap > 0) || !(init_scale > 0)) {
      throw ParameterError("optimizer rates, temperatures and tolerances must be positive");
    }
    if (workspace < 0 || workspace > kMaxOptimizerWorkspace) {
      throw ParameterError("workspace must be in 1.." + std::to_string(kMaxOptimizerWorkspace) + " (0 = auto)");
    }
  }
};

struct RestartOutcome {
  double best_success = -1.0;
  Eigen::VectorXd best_params;
  std::vector<double> successes;
  int iterations = 0;
  bool converged = false;
};

struct OptResult {
  double best_success = 0.0;
  ParamAlgorithm parameters;
  std::vector<double> per_function_success;
  Rational bound_ceiling;  // M(N,k) / D
  double certified_gap = 0.0;
  bool converged = false;
  int workspace = 1;
  int restarts_run = 0;
  int best_restart = 0;
  std::vector<double> restart_best;
};

namespace detail {

inline RestartOutcome run_restart(const ObjectiveEngine& engine, const ParamAlgorithm& start,
                                  const OptimizerConfig& cfg, double ceiling) {
  RestartOutcome out;
  Eigen::VectorXd theta = start.flatten();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-12;
  const double steps = std::max(1, cfg.max_iterations - 1);
  double last_improvement_value = -1.0;
  int last_improvement_iter = 0;
  for (int t = 0; t < cfg.max_iterations; ++t) {
    const double frac = t / steps;
    const double tau = cfg.tau_start * std::pow(cfg.tau_end / cfg.tau_start, frac);
    const double lr = cfg.learning_rate * std::pow(cfg.final_learning_rate / cfg.learning_rate, frac);
    const auto eval = engine.evaluate(start.with_flat(theta), tau, true);
    out.iterations = t + 1;
    if (eval.worst_case > out.best_success) {
      out.best_success = eval.worst_case;
      out.best_params = theta;
      out.successes = eval.successes;
    }
    if (out.best_success > last_improvement_value + cfg.tolerance) {
      last_improvement_value = out.best_success;
      last_improvement_iter = t;
    }
    if (out.best_success >= ceiling - cfg.stop_gap || t - last_improvement_iter >= cfg.patience) {
      out.converged = true;
      break;
    }
    // Adam ascent.
    m1 = beta1 * m1 + (1 - beta1) * eval.gradient;
    m2 = beta2 * m2 + (1 - beta2) * eval.gradient.cwiseAbs2();
    const double c1 = 1 - std::pow(beta1, t + 1);
    const double c2 = 1 - std::pow(beta2, t + 1);
    theta.array() += lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + eps);
  }
  return out;
}

}  // namespace detail

inline OptResult optimize(const FunctionFamily& fam, int queries, const OptimizerConfig& cfg) {
  cfg.validate();
  const int n = fam.domain_size();
  if (n > kMaxOptimizerDomain) throw CapacityError("optimizer needs N <= " + std::to_string(kMaxOptimizerDomain));
  if (queries < 1 || queries > kMaxOptimizerQueries || queries > n) {
    throw ParameterError("optimizer needs 1 <= k <= min(N, " + std::to_string(kMaxOptimizerQueries) + ")");
  }
  const int workspace = cfg.workspace > 0 ? cfg.workspace : default_workspace(n, fam.size());
  if (workspace > kMaxOptimizerWorkspace) {
    throw CapacityError("family needs workspace " + std::to_string(workspace) + " > " +
                        std::to_string(kMaxOptimizerWorkspace));
  }
  const Rational ceiling_exact(m_sum(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(queries)),
                               BigInt(fam.size()));
  const double ceiling = std::min(1.0, to_double(ceiling_exact));
  const detail::ObjectiveEngine engine(fam, workspace);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  auto run_one = [&](int r) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffU),
                      static_cast<std::uint32_t>(cfg.seed >> 32), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    const auto start = ParamAlgorithm::random(n, workspace, queries, rng, cfg.init_scale);
    outcomes[static_cast<std::size_t>(r)] = detail::run_restart(engine, start, cfg, ceiling);
  };

  OptResult result{0.0, ParamAlgorithm::zero(n, workspace, queries), {}, ceiling_exact, 0.0, false, workspace, 0, 0, {}};
  double best = -1.0;
  for (int begin = 0; begin < cfg.restarts; begin += cfg.batch) {
    const int end = std::min(cfg.restarts, begin + cfg.batch);
    if (cfg.threads <= 1) {
      for (int r = begin; r < end; ++r) run_one(r);
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next{begin};
      const int workers = std::min(cfg.threads, end - begin);
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
          for (int r = next++; r < end; r = next++) run_one(r);
        });
      }
      for (auto& th : pool) th.join();
    }
    for (int r = begin; r < end; ++r) {
      const auto& o = outcomes[static_cast<std::size_t>(r)];
      result.restart_best.push_back(o.best_success);
      if (o.best_success > best) {
        best = o.best_success;
        result.best_restart = r;
      }
    }
    result.restarts_run = end;
    if (best >= ceiling - cfg.stop_gap) break;
  }

  const auto& win = outcomes[static_cast<std::size_t>(result.best_restart)];
  result.best_success = win.best_success;
  result.parameters = ParamAlgorithm::zero(n, workspace, queries).with_flat(win.best_params);
  result.per_function_success = win.successes;
  result.converged = win.converged;
  result.certified_gap = to_double(ceiling_exact) - result.best_success;
  if (result.best_success > to_double(ceiling_exact) + 1e-9) {
    throw std::logic_error("optimizer exceeded the counting ceiling: " + std::to_string(result.best_success));
  }
  return result;
}

struct SevenSetRow {
  std::uint64_t excluded = 0;          // mask of the function left out
  std::vector<std::uint64_t> members;  // the seven masks
  double best_success = 0.0;
  bool converged = false;
};

struct SevenSetTable {
  std::vector<SevenSetRow> rows;
  double global_max = 0.0;
  Rational bound_ceiling;  // M(3,2)/7 = 1
  /// Every best-found success stays below 1 - 1e-6.
  bool all_below_one = true;
};

/// All eight 7-member subsets of the functions on N = 3, searched at k = 2.
inline SevenSetTable search_seven_function_sets(const OptimizerConfig& cfg) {
  constexpr int n = 3;
  constexpr int k = 2;
  SevenSetTable table;
  table.bound_ceiling = Rational(m_sum(n, k), 7);
  for (std::uint64_t excluded = 0; excluded < 8; ++excluded) {
    SevenSetRow row;
    row.excluded = excluded;
    for (std::uint64_t m = 0; m < 8; ++m) {
      if (m != excluded) row.members.push_back(m);
    }
    const auto res = optimize(make_family(n, row.members), k, cfg);
    row.best_success = res.best_success;
    row.converged = res.converged;
    table.global_max = std::max(table.global_max, row.best_success);
    table.all_below_one = table.all_below_one && row.best_success < 1.0 - 1e-6;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qql
