#pragma once

// Fast invariant checks run by `domkl validate`.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "domkl/dokl.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"
#include "domkl/hedge.hpp"
#include "domkl/learner.hpp"
#include "domkl/oracle.hpp"
#include "domkl/simulator.hpp"

namespace domkl {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Dual update used by the lambda-sum check; replaceable so the suite can be
/// shown to catch a broken update.
using LambdaRule = std::function<Vector(const KernelLearnerState&, const Vector&,
                                        std::span<const Vector>, const AdmmConfig&)>;

struct ValidateOptions {
  LambdaRule lambda_rule = [](const KernelLearnerState& s, const Vector& own,
                              std::span<const Vector> nbr, const AdmmConfig& cfg) {
    return lambda_update(s, own, nbr, cfg);
  };
  std::uint64_t seed = 2024;
};

/// Mutant of the dual update with the sign of the neighbor term flipped.
inline Vector lambda_update_sign_flipped(const KernelLearnerState& s, const Vector& own,
                                         std::span<const Vector> nbr, const AdmmConfig& cfg) {
  Vector acc = Vector::Zero(own.size());
  for (const auto& t : nbr) acc += own + t;
  return s.lambda + 0.5 * cfg.rho * acc;
}

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline CheckResult check_feature_norm(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  const auto maps = build_dictionary_maps(default_dictionary(seed), 5, 50);
  for (int i = 0; i < 10000; ++i) {
    Vector x(5);
    for (auto& v : x) v = u(rng);
    const Vector z = (*maps[static_cast<std::size_t>(i) % maps.size()])(x);
    worst = std::max(worst, std::abs(z.squaredNorm() - 1.0));
  }
  return {"feature_norm", worst <= 1e-12, "max | |z|^2 - 1 | = " + fmt_double(worst)};
}

inline ExperimentConfig small_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.num_nodes = 6;
  c.connection_prob = 0.5;
  c.master_seed = seed;
  c.synthetic.bandwidth = 0.1;
  c.synthetic.input_dim = 2;
  c.synthetic.samples_per_learner = 200;
  c.bandwidths = {0.01, 0.1, 1.0, 10.0};
  c.algorithms = {Algorithm::domkl};
  c.compute_regret = false;
  return c;
}

inline CheckResult check_simplex(std::uint64_t seed) {
  const auto r = run_trial(small_config(seed), 0);
  double worst = 0.0;
  bool nonneg = true;
  for (const auto& rec : r.traces.front().rounds)
    for (Eigen::Index k = 0; k < rec.weights.rows(); ++k) {
      worst = std::max(worst, std::abs(rec.weights.row(k).sum() - 1.0));
      nonneg = nonneg && (rec.weights.row(k).array() >= 0.0).all() && (rec.weights.row(k).array() <= 1.0).all();
    }
  return {"hedge_simplex", nonneg && worst <= 1e-12, "max |sum q - 1| = " + fmt_double(worst)};
}

inline CheckResult check_lambda_sum(const ValidateOptions& opt) {
  const Graph g = sample_connected_er(8, 0.4, opt.seed, 1000).graph;
  const FeatureMap fm(KernelSpec(0.5), 3, 10, opt.seed + 1);
  std::mt19937_64 rng(opt.seed + 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const AdmmConfig cfg;
  std::vector<KernelLearnerState> st(g.num_nodes(), KernelLearnerState(fm.output_dim()));
  double worst_ratio = 0.0;
  for (std::size_t t = 1; t <= 200; ++t) {
    std::vector<Vector> next(st.size());
    for (NodeId k = 0; k < g.num_nodes(); ++k) {
      Vector x(3);
      for (auto& v : x) v = u(rng);
      std::vector<Vector> nbr;
      for (NodeId l : g.neighbors(k)) nbr.push_back(st[l].theta);
      next[k] = theta_update_quadratic(st[k], fm(x), std::sin(4.0 * x.sum()), gamma_hat(st[k].theta, nbr),
                                       g.degree(k), cfg);
    }
    for (NodeId k = 0; k < g.num_nodes(); ++k) {
      std::vector<Vector> nbr;
      for (NodeId l : g.neighbors(k)) nbr.push_back(next[l]);
      st[k].lambda = opt.lambda_rule(st[k], next[k], nbr, cfg);
    }
    Vector total = Vector::Zero(static_cast<Eigen::Index>(fm.output_dim()));
    for (NodeId k = 0; k < g.num_nodes(); ++k) {
      st[k].theta = next[k];
      total += st[k].lambda;
    }
    worst_ratio = std::max(worst_ratio, total.cwiseAbs().maxCoeff() / (1e-9 * static_cast<double>(t)));
  }
  return {"lambda_network_sum", worst_ratio <= 1.0,
          "max |sum_k lambda_k| / (1e-9 t) = " + fmt_double(worst_ratio)};
}

inline CheckResult check_edge_antisymmetry(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  bool exact = true;
  for (const Graph& g : {path_graph(3), star_graph(4), complete_graph(3)}) {
    auto p = JointStepProblem::zeros(g, 4, 100.0, 10.0);
    for (int t = 0; t < 50; ++t) {
      for (NodeId k = 0; k < g.num_nodes(); ++k) {
        for (auto& v : p.z[k]) v = n(rng);
        p.z[k] /= p.z[k].norm();
        p.y[k] = n(rng);
      }
      joint_admm_step(p);
      for (auto [a, b] : g.edges())
        exact = exact && ((p.duals.at({a, b}) + p.duals.at({b, a})).array() == 0.0).all();
    }
  }
  return {"edge_dual_antisymmetry", exact, exact ? "lambda_kl + lambda_lk == 0 bitwise" : "violated"};
}

inline CheckResult check_joint_decomposition(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const Graph g = path_graph(3);
  const std::size_t dim = 4;
  auto p = JointStepProblem::zeros(g, dim, 100.0, 10.0);
  std::vector<KernelLearnerState> st(3, KernelLearnerState(dim));
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    for (NodeId k = 0; k < 3; ++k) {
      for (auto& v : p.z[k]) v = n(rng);
      p.z[k] /= p.z[k].norm();
      p.y[k] = n(rng);
    }
    const auto joint = joint_admm_step(p);
    dokl_round(st, g, p.z, p.y, AdmmConfig{p.rho, p.eta_local});
    for (NodeId k = 0; k < 3; ++k) worst = std::max(worst, (joint[k] - st[k].theta).cwiseAbs().maxCoeff());
  }
  return {"joint_decomposition_path3", worst <= 1e-6, "max |joint - distributed| = " + fmt_double(worst)};
}

inline CheckResult check_single_kernel_reduction(std::uint64_t seed) {
  auto c = small_config(seed);
  c.bandwidths = {0.1};
  c.dokl.kernel = 0;
  c.algorithms = {Algorithm::domkl, Algorithm::dokl};
  const auto r = run_trial(c, 0);
  bool same = r.traces[0].rounds.size() == r.traces[1].rounds.size();
  for (std::size_t t = 0; same && t < r.traces[0].rounds.size(); ++t)
    same = r.traces[0].rounds[t].cross == r.traces[1].rounds[t].cross;
  return {"single_kernel_reduction", same, same ? "P=1 trajectory identical" : "trajectories differ"};
}

inline CheckResult check_determinism(std::uint64_t seed) {
  auto c = small_config(seed);
  c.algorithms = {Algorithm::domkl, Algorithm::dokl, Algorithm::comkl, Algorithm::rff_dokl};
  c.dokl.kernel = 1;
  c.rff_dokl.kernel = 1;
  const auto a = run_trial(c, 3);
  const auto b = run_trial(c, 3);
  bool same = a.graph == b.graph && a.traces.size() == b.traces.size();
  for (std::size_t i = 0; same && i < a.traces.size(); ++i) same = a.traces[i] == b.traces[i];
  return {"deterministic_rerun", same, same ? "traces bitwise equal" : "traces differ"};
}

}  // namespace detail

inline std::vector<CheckResult> run_invariant_suite(const ValidateOptions& opt = {}) {
  return {
      detail::check_feature_norm(opt.seed),
      detail::check_simplex(opt.seed),
      detail::check_lambda_sum(opt),
      detail::check_edge_antisymmetry(opt.seed),
      detail::check_joint_decomposition(opt.seed),
      detail::check_single_kernel_reduction(opt.seed),
      detail::check_determinism(opt.seed),
  };
}

}  // namespace domkl
