#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"

namespace domkl {

struct AdmmConfig {
  double rho = 100.0;        // consensus penalty
  double eta_local = 10.0;   // proximal weight on the previous iterate

  void validate() const {
    if (!(rho > 0.0)) throw ParameterError("rho must be positive");
    if (!(eta_local > 0.0)) throw ParameterError("eta_local must be positive");
  }
};

/// Per-(learner, kernel) online ADMM state. lambda is the learner's
/// aggregated dual, the sum of its per-edge multipliers.
struct KernelLearnerState {
  Vector theta;
  Vector lambda;

  KernelLearnerState() = default;
  explicit KernelLearnerState(std::size_t dim)
      : theta(Vector::Zero(static_cast<Eigen::Index>(dim))),
        lambda(Vector::Zero(static_cast<Eigen::Index>(dim))) {}
};

/// Convex loss of a scalar prediction against a label.
struct LossModel {
  std::function<double(double prediction, double label)> evaluate;
  std::function<double(double prediction, double label)> gradient;  // d/d prediction
};

inline double squared_loss(double prediction, double label) {
  const double r = label - prediction;
  return r * r;
}

inline LossModel quadratic_loss() {
  return {squared_loss, [](double pred, double y) { return 2.0 * (pred - y); }};
}

/// Huber loss scaled so that it matches (pred - y)^2 inside |r| <= delta.
inline LossModel huber_loss(double delta) {
  if (!(delta > 0.0)) throw ParameterError("huber delta must be positive");
  return {[delta](double pred, double y) {
            const double r = std::abs(pred - y);
            return r <= delta ? r * r : delta * (2.0 * r - delta);
          },
          [delta](double pred, double y) {
            const double r = pred - y;
            return std::abs(r) <= delta ? 2.0 * r : 2.0 * delta * (r > 0 ? 1.0 : -1.0);
          }};
}

namespace detail {
inline void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) throw ParameterError(std::string(what) + ": dimension mismatch");
}
inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericError(std::string(what) + ": non-finite input");
}
}  // namespace detail

inline double predict(const Vector& theta, const Vector& z) {
  detail::require_same_dim(theta, z, "predict");
  return theta.dot(z);
}

/// Sum over neighbors of the midpoint (theta_k + theta_l) / 2.
inline Vector gamma_hat(const Vector& own_theta, std::span<const Vector> neighbor_thetas) {
  Vector g = Vector::Zero(own_theta.size());
  for (const auto& t : neighbor_thetas) {
    detail::require_same_dim(own_theta, t, "gamma_hat");
    g += 0.5 * (own_theta + t);
  }
  return g;
}

/// Right-hand side 2 y z + eta_l theta + rho gamma - lambda of the quadratic step.
inline Vector quadratic_step_rhs(const KernelLearnerState& s, const Vector& z, double label,
                                 const Vector& gamma, const AdmmConfig& cfg) {
  return 2.0 * label * z + cfg.eta_local * s.theta + cfg.rho * gamma - s.lambda;
}

/// Closed-form theta step for the squared loss:
///   (2 z z^T + alpha I)^{-1} b,  alpha = eta_l + rho * degree,
/// applied through Sherman-Morrison in O(M).
inline Vector theta_update_quadratic(const KernelLearnerState& s, const Vector& z, double label,
                                     const Vector& gamma, std::size_t degree,
                                     const AdmmConfig& cfg) {
  detail::require_same_dim(s.theta, z, "theta_update_quadratic");
  detail::require_same_dim(s.theta, gamma, "theta_update_quadratic");
  detail::require_same_dim(s.theta, s.lambda, "theta_update_quadratic");
  detail::require_finite(z, "theta_update_quadratic");
  detail::require_finite(gamma, "theta_update_quadratic");
  if (!std::isfinite(label)) throw NumericError("theta_update_quadratic: non-finite label");
  const double alpha = cfg.eta_local + cfg.rho * static_cast<double>(degree);
  const Vector b = quadratic_step_rhs(s, z, label, gamma, cfg);
  const double coeff = 2.0 * z.dot(b) / (alpha * (alpha + 2.0 * z.squaredNorm()));
  return b / alpha - coeff * z;
}

/// Same step through an explicit dense solve; kept as a reference path.
inline Vector theta_update_dense(const KernelLearnerState& s, const Vector& z, double label,
                                 const Vector& gamma, std::size_t degree, const AdmmConfig& cfg) {
  const double alpha = cfg.eta_local + cfg.rho * static_cast<double>(degree);
  const Eigen::Index n = z.size();
  Matrix a = 2.0 * z * z.transpose() + alpha * Matrix::Identity(n, n);
  return a.ldlt().solve(quadratic_step_rhs(s, z, label, gamma, cfg));
}

/// Per-node ADMM objective, up to a constant independent of theta:
///   L(theta^T z, y) + lambda^T theta + rho/2 (deg |theta|^2 - 2 theta^T gamma)
///   + eta_l/2 |theta - theta_t|^2
inline double local_objective(const KernelLearnerState& s, const LossModel& loss, const Vector& z,
                              double label, const Vector& gamma, std::size_t degree,
                              const AdmmConfig& cfg, const Vector& theta) {
  const double deg = static_cast<double>(degree);
  return loss.evaluate(theta.dot(z), label) + s.lambda.dot(theta) +
         0.5 * cfg.rho * (deg * theta.squaredNorm() - 2.0 * theta.dot(gamma)) +
         0.5 * cfg.eta_local * (theta - s.theta).squaredNorm();
}

inline Vector local_objective_gradient(const KernelLearnerState& s, const LossModel& loss,
                                       const Vector& z, double label, const Vector& gamma,
                                       std::size_t degree, const AdmmConfig& cfg,
                                       const Vector& theta) {
  const double deg = static_cast<double>(degree);
  return loss.gradient(theta.dot(z), label) * z + s.lambda +
         cfg.rho * (deg * theta - gamma) + cfg.eta_local * (theta - s.theta);
}

/// Theta step for any convex loss: gradient descent with Armijo backtracking
/// (c = 1e-4, shrink 0.5) started at theta_t, until |grad| <= tol.
inline Vector theta_update_general(const KernelLearnerState& s, const LossModel& loss,
                                   const Vector& z, double label, const Vector& gamma,
                                   std::size_t degree, const AdmmConfig& cfg, double tol,
                                   std::size_t max_iters) {
  if (!(tol > 0.0)) throw ParameterError("theta_update_general: tol must be positive");
  detail::require_same_dim(s.theta, z, "theta_update_general");
  detail::require_same_dim(s.theta, gamma, "theta_update_general");
  constexpr double armijo = 1e-4;
  constexpr double shrink = 0.5;
  const double strong = cfg.eta_local + cfg.rho * static_cast<double>(degree);

  auto f = [&](const Vector& th) {
    return local_objective(s, loss, z, label, gamma, degree, cfg, th);
  };
  Vector theta = s.theta;
  double value = f(theta);
  double gnorm = 0.0;
  // Initial trial step 1/strong is exact for the quadratic part; backtracking handles the loss.
  double step = 1.0 / strong;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vector g = local_objective_gradient(s, loss, z, label, gamma, degree, cfg, theta);
    gnorm = g.norm();
    if (!std::isfinite(gnorm)) throw NumericError("theta_update_general: non-finite gradient");
    if (gnorm <= tol) return theta;
    double t = step * 2.0;
    Vector cand = theta - t * g;
    double cand_value = f(cand);
    const auto sufficient = [&] {
      return cand_value < value && cand_value <= value - armijo * t * gnorm * gnorm;
    };
    while (!sufficient()) {
      t *= shrink;
      if (t < 1e-20) break;
      cand = theta - t * g;
      cand_value = f(cand);
    }
    if (!sufficient()) {
      // Near the optimum the decrease drops below the rounding of f; fall
      // back to a gradient-norm test with a step that cannot overshoot.
      t = 1.0 / (strong + std::abs(loss.gradient(1.0, 0.0) - loss.gradient(0.0, 0.0)) * z.squaredNorm());
      cand = theta - t * g;
      if (local_objective_gradient(s, loss, z, label, gamma, degree, cfg, cand).norm() >= gnorm) break;
      cand_value = f(cand);
    }
    step = t;
    theta = std::move(cand);
    value = cand_value;
  }
  const Vector g = local_objective_gradient(s, loss, z, label, gamma, degree, cfg, theta);
  gnorm = g.norm();
  if (gnorm <= tol) return theta;
  throw ConvergenceError("theta_update_general: no convergence", gnorm);
}

/// lambda_{t+1} = lambda_t + (rho / 2) sum_l (theta_k - theta_l), all at t+1.
inline Vector lambda_update(const KernelLearnerState& s, const Vector& own_theta_new,
                            std::span<const Vector> neighbor_thetas_new, const AdmmConfig& cfg) {
  detail::require_same_dim(s.lambda, own_theta_new, "lambda_update");
  Vector diff = Vector::Zero(own_theta_new.size());
  for (const auto& t : neighbor_thetas_new) {
    detail::require_same_dim(own_theta_new, t, "lambda_update");
    diff += own_theta_new - t;
  }
  return s.lambda + 0.5 * cfg.rho * diff;
}

/// One synchronous DOKL round over the whole network for a single kernel:
/// every node takes its theta step against the round-start snapshot, the new
/// thetas are exchanged, then every node updates its dual.
/// `z[k]` and `labels[k]` are node k's mapped sample for this round.
inline void dokl_round(std::vector<KernelLearnerState>& states, const Graph& g,
                std::span<const Vector> z, std::span<const double> labels,
                const AdmmConfig& cfg) {
  const std::size_t k_count = states.size();
  if (z.size() != k_count || labels.size() != k_count || g.num_nodes() != k_count)
    throw ParameterError("dokl_round: one sample per node required");
  std::vector<Vector> next(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::vector<Vector> nbr;
    for (auto l : g.neighbors(k)) nbr.push_back(states[l].theta);
    const Vector gamma = gamma_hat(states[k].theta, nbr);
    next[k] = theta_update_quadratic(states[k], z[k], labels[k], gamma, g.degree(k), cfg);
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    std::vector<Vector> nbr;
    for (auto l : g.neighbors(k)) nbr.push_back(next[l]);
    states[k].lambda = lambda_update(states[k], next[k], nbr, cfg);
  }
  for (std::size_t k = 0; k < k_count; ++k) states[k].theta = std::move(next[k]);
}

}  // namespace domkl
