#pragma once

// Brute-force references for the distributed updates. Nothing here exploits
// the per-node decomposition; tests compare these against the fast paths.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "domkl/dokl.hpp"
#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"
#include "domkl/hindsight.hpp"
#include "domkl/simulator.hpp"

namespace domkl {

using DirectedEdge = std::pair<NodeId, NodeId>;

/// One time step of the edge-form consensus problem: per-node samples and
/// previous iterates, one auxiliary vector per undirected edge {k,l} (the
/// constraints are theta_k = gamma_{kl} and theta_l = gamma_{kl}) and one
/// multiplier per ordered pair (k,l) for the constraint on theta_k.
struct JointStepProblem {
  Graph graph;
  std::vector<Vector> z;
  std::vector<double> y;
  std::vector<Vector> theta_prev;
  std::map<Edge, Vector> gammas;
  std::map<DirectedEdge, Vector> duals;
  double rho = 100.0;
  double eta_local = 10.0;
  std::optional<LossModel> loss;  // empty: squared loss, solved exactly

  std::size_t dim() const { return static_cast<std::size_t>(theta_prev.front().size()); }

  /// All-zero iterates, auxiliaries and duals; samples left for the caller.
  static JointStepProblem zeros(const Graph& g, std::size_t dim, double rho, double eta_local) {
    JointStepProblem p;
    p.graph = g;
    p.rho = rho;
    p.eta_local = eta_local;
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(dim));
    p.z.assign(g.num_nodes(), zero);
    p.y.assign(g.num_nodes(), 0.0);
    p.theta_prev.assign(g.num_nodes(), zero);
    for (auto e : g.edges()) {
      p.gammas[e] = zero;
      p.duals[{e.first, e.second}] = zero;
      p.duals[{e.second, e.first}] = zero;
    }
    return p;
  }
};

namespace detail {
inline const Vector& gamma_of(const JointStepProblem& p, NodeId a, NodeId b) {
  return p.gammas.at(std::minmax(a, b));
}

/// Augmented Lagrangian restricted to theta, with gamma and duals fixed.
inline double joint_objective(const JointStepProblem& p, const LossModel& loss,
                              const std::vector<Vector>& th) {
  double v = 0.0;
  for (NodeId k = 0; k < p.graph.num_nodes(); ++k) {
    v += loss.evaluate(th[k].dot(p.z[k]), p.y[k]);
    v += 0.5 * p.eta_local * (th[k] - p.theta_prev[k]).squaredNorm();
  }
  for (const auto& [edge, lam] : p.duals) {
    const Vector c = th[edge.first] - gamma_of(p, edge.first, edge.second);
    v += lam.dot(c) + 0.5 * p.rho * c.squaredNorm();
  }
  return v;
}

inline std::vector<Vector> joint_gradient(const JointStepProblem& p, const LossModel& loss,
                                          const std::vector<Vector>& th) {
  std::vector<Vector> g(th.size());
  for (NodeId k = 0; k < p.graph.num_nodes(); ++k)
    g[k] = loss.gradient(th[k].dot(p.z[k]), p.y[k]) * p.z[k] + p.eta_local * (th[k] - p.theta_prev[k]);
  for (const auto& [edge, lam] : p.duals)
    g[edge.first] += lam + p.rho * (th[edge.first] - gamma_of(p, edge.first, edge.second));
  return g;
}
}  // namespace detail

/// Exact joint minimiser over all stacked thetas. Squared loss: one dense
/// (2MK x 2MK) linear solve assembled constraint by constraint. Other convex
/// losses: gradient descent with backtracking until |grad| <= 1e-10.
inline std::vector<Vector> joint_theta_step(const JointStepProblem& p) {
  const std::size_t kc = p.graph.num_nodes();
  const auto d = static_cast<Eigen::Index>(p.dim());
  if (!p.loss) {
    const Eigen::Index n = d * static_cast<Eigen::Index>(kc);
    Matrix h = Matrix::Zero(n, n);
    Vector b = Vector::Zero(n);
    for (NodeId k = 0; k < kc; ++k) {
      const Eigen::Index o = d * static_cast<Eigen::Index>(k);
      h.block(o, o, d, d) += 2.0 * p.z[k] * p.z[k].transpose();
      h.block(o, o, d, d).diagonal().array() += p.eta_local;
      b.segment(o, d) += 2.0 * p.y[k] * p.z[k] + p.eta_local * p.theta_prev[k];
    }
    for (const auto& [edge, lam] : p.duals) {
      const Eigen::Index o = d * static_cast<Eigen::Index>(edge.first);
      h.block(o, o, d, d).diagonal().array() += p.rho;
      b.segment(o, d) += p.rho * detail::gamma_of(p, edge.first, edge.second) - lam;
    }
    Eigen::LDLT<Matrix> ldlt(h);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw NumericError("joint_theta_step: singular system");
    const Vector sol = ldlt.solve(b);
    std::vector<Vector> out(kc);
    for (NodeId k = 0; k < kc; ++k) out[k] = sol.segment(d * static_cast<Eigen::Index>(k), d);
    return out;
  }

  // Gradient descent whose step is halved until the objective is still
  // decreasing at the trial point (g(cand).g >= 0). On the convex line
  // restriction this guarantees descent without comparing objective values,
  // which stop resolving progress long before |grad| reaches 1e-10.
  const LossModel& loss = *p.loss;
  std::vector<Vector> th = p.theta_prev;
  constexpr double tol = 1e-10;
  double step = 1.0;
  for (int it = 0; it < 100000; ++it) {
    const auto g = detail::joint_gradient(p, loss, th);
    double gn2 = 0.0;
    for (const auto& gi : g) gn2 += gi.squaredNorm();
    if (std::sqrt(gn2) <= tol) return th;
    std::vector<Vector> cand(kc);
    step *= 2.0;
    while (true) {
      for (NodeId k = 0; k < kc; ++k) cand[k] = th[k] - step * g[k];
      const auto gc = detail::joint_gradient(p, loss, cand);
      double slope = 0.0;
      for (NodeId k = 0; k < kc; ++k) slope += gc[k].dot(g[k]);
      if (slope >= 0.0 || step < 1e-20) break;
      step *= 0.5;
    }
    th = std::move(cand);
  }
  double gn2 = 0.0;
  for (const auto& gi : detail::joint_gradient(p, loss, th)) gn2 += gi.squaredNorm();
  if (std::sqrt(gn2) <= tol) return th;
  throw ConvergenceError("joint_theta_step: no convergence", std::sqrt(gn2));
}

/// Exact gamma minimiser: midpoint plus (lambda_kl + lambda_lk) / (2 rho),
/// which is the plain midpoint whenever the duals are antisymmetric.
inline std::map<Edge, Vector> joint_gamma_step(const JointStepProblem& p,
                                               const std::vector<Vector>& new_thetas) {
  std::map<Edge, Vector> out;
  for (auto [a, b] : p.graph.edges())
    out[{a, b}] = 0.5 * (new_thetas[a] + new_thetas[b]) +
                  (p.duals.at({a, b}) + p.duals.at({b, a})) / (2.0 * p.rho);
  return out;
}

/// lambda_(k,l) += rho (theta_k - gamma_{kl}) for every ordered pair.
inline std::map<DirectedEdge, Vector> edge_dual_step(const JointStepProblem& p,
                                                     const std::vector<Vector>& new_thetas,
                                                     const std::map<Edge, Vector>& new_gammas) {
  std::map<DirectedEdge, Vector> out;
  for (const auto& [edge, lam] : p.duals)
    out[edge] = lam + p.rho * (new_thetas[edge.first] - new_gammas.at(std::minmax(edge.first, edge.second)));
  return out;
}

/// Dual step with the gamma minimiser substituted:
///   lambda_(k,l) <- (rho/2)(theta_k - theta_l) + (lambda_(k,l) - lambda_(l,k)) / 2.
/// Every term flips sign under k <-> l, so antisymmetry holds bit for bit.
inline std::map<DirectedEdge, Vector> edge_dual_step_closed(const JointStepProblem& p,
                                                            const std::vector<Vector>& new_thetas) {
  std::map<DirectedEdge, Vector> out;
  for (const auto& [edge, lam] : p.duals) {
    const auto [k, l] = edge;
    out[edge] = 0.5 * p.rho * (new_thetas[k] - new_thetas[l]) + 0.5 * (lam - p.duals.at({l, k}));
  }
  return out;
}

/// sum_{l in N_k} lambda_(k,l): the per-node dual the distributed learner keeps.
inline Vector aggregated_dual(const JointStepProblem& p, NodeId k) {
  Vector s = Vector::Zero(static_cast<Eigen::Index>(p.dim()));
  for (NodeId l : p.graph.neighbors(k)) s += p.duals.at({k, l});
  return s;
}

/// Advances the edge-form problem by one full ADMM step (theta, gamma, dual)
/// and returns the new thetas; samples for the next step are left unchanged.
inline std::vector<Vector> joint_admm_step(JointStepProblem& p) {
  auto th = joint_theta_step(p);
  auto gm = joint_gamma_step(p, th);
  p.duals = edge_dual_step_closed(p, th);
  p.gammas = std::move(gm);
  p.theta_prev = th;
  return th;
}

struct BestKernelResult {
  std::size_t index = 0;
  std::vector<double> mean_final_mse;  // per dictionary kernel
};

/// Index of the smallest value; the first one wins on ties.
inline std::size_t lowest_argmin(const std::vector<double>& v) {
  if (v.empty()) throw ParameterError("lowest_argmin: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}

/// Runs single-kernel DOKL for every dictionary kernel on identical trials
/// and returns the kernel with the lowest mean final MSE (lowest index on ties).
inline BestKernelResult exhaustive_best_kernel(const ExperimentConfig& cfg) {
  BestKernelResult r;
  for (std::size_t p = 0; p < cfg.bandwidths.size(); ++p) {
    ExperimentConfig c = cfg;
    c.algorithms = {Algorithm::dokl};
    c.dokl.kernel = p;
    c.compute_regret = false;
    r.mean_final_mse.push_back(run_experiment(c).of(Algorithm::dokl).final_mse());
  }
  r.index = lowest_argmin(r.mean_final_mse);
  return r;
}

}  // namespace domkl
