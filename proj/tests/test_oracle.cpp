#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "domkl/oracle.hpp"

using namespace domkl;

namespace {

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

Vector unit(std::mt19937_64& rng, Eigen::Index n) {
  Vector v = random_vector(rng, n);
  return v / v.norm();
}

// Random edge-form state that the aggregated representation can express:
// antisymmetric duals and midpoint auxiliaries.
JointStepProblem random_problem(std::mt19937_64& rng, const Graph& g, Eigen::Index dim,
                                double rho, double eta) {
  auto p = JointStepProblem::zeros(g, static_cast<std::size_t>(dim), rho, eta);
  for (NodeId k = 0; k < g.num_nodes(); ++k) {
    p.z[k] = unit(rng, dim);
    p.y[k] = std::normal_distribution<double>(0.0, 1.0)(rng);
    p.theta_prev[k] = random_vector(rng, dim);
  }
  for (auto [a, b] : g.edges()) {
    p.gammas[{a, b}] = 0.5 * (p.theta_prev[a] + p.theta_prev[b]);
    const Vector lam = random_vector(rng, dim, 5.0);
    p.duals[{a, b}] = lam;
    p.duals[{b, a}] = -lam;
  }
  return p;
}

std::vector<Vector> distributed_step(const JointStepProblem& p) {
  std::vector<Vector> out;
  const AdmmConfig cfg{p.rho, p.eta_local};
  for (NodeId k = 0; k < p.graph.num_nodes(); ++k) {
    KernelLearnerState s;
    s.theta = p.theta_prev[k];
    s.lambda = aggregated_dual(p, k);
    std::vector<Vector> nbr;
    for (NodeId l : p.graph.neighbors(k)) nbr.push_back(p.theta_prev[l]);
    out.push_back(theta_update_quadratic(s, p.z[k], p.y[k], gamma_hat(s.theta, nbr), nbr.size(), cfg));
  }
  return out;
}

double max_diff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST(JointThetaStep, SingleNodeMatchesClosedForm) {
  std::mt19937_64 rng(1);
  auto p = random_problem(rng, Graph(1, {}), 6, 100.0, 10.0);
  KernelLearnerState s;
  s.theta = p.theta_prev[0];
  s.lambda = Vector::Zero(6);
  const Vector closed = theta_update_quadratic(s, p.z[0], p.y[0], Vector::Zero(6), 0, {});
  EXPECT_LE((joint_theta_step(p)[0] - closed).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(JointThetaStep, ZeroDataGivesZeros) {
  const auto p = JointStepProblem::zeros(path_graph(3), 4, 100.0, 10.0);
  for (const auto& t : joint_theta_step(p)) EXPECT_TRUE(t.isZero(0.0));
}

TEST(JointThetaStep, DecompositionOnSmallGraphs) {
  std::mt19937_64 rng(2);
  const std::vector<Graph> graphs{path_graph(3), star_graph(4), complete_graph(3)};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Graph& g = graphs[static_cast<std::size_t>(i) % 3];
    const Eigen::Index dim = 2 * (1 + (i / 3) % 2);
    const auto p = random_problem(rng, g, dim, 100.0, 10.0);
    worst = std::max(worst, max_diff(joint_theta_step(p), distributed_step(p)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(JointThetaStep, GeneralLossMatchesPerNodeSolver) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto p = random_problem(rng, path_graph(3), 4, 2.0, 1.0);
    for (auto& y : p.y) y *= 4.0;
    p.loss = huber_loss(0.5);
    const auto joint = joint_theta_step(p);
    EXPECT_LE(detail::joint_objective(p, *p.loss, joint), detail::joint_objective(p, *p.loss, p.theta_prev));
    const AdmmConfig cfg{p.rho, p.eta_local};
    for (NodeId k = 0; k < 3; ++k) {
      KernelLearnerState s;
      s.theta = p.theta_prev[k];
      s.lambda = aggregated_dual(p, k);
      std::vector<Vector> nbr;
      for (NodeId l : p.graph.neighbors(k)) nbr.push_back(p.theta_prev[l]);
      const Vector local = theta_update_general(s, *p.loss, p.z[k], p.y[k], gamma_hat(s.theta, nbr),
                                                nbr.size(), cfg, 1e-11, 100000);
      EXPECT_LE((joint[k] - local).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(JointGammaStep, Examples) {
  auto p = JointStepProblem::zeros(path_graph(2), 2, 100.0, 10.0);
  Vector a(2), b(2);
  a << 2.0, 0.0;
  b << 0.0, 2.0;
  const auto g = joint_gamma_step(p, {a, b});
  EXPECT_TRUE(g.at({0, 1}) == Vector::Ones(2));
  EXPECT_TRUE(joint_gamma_step(p, {a, a}).at({0, 1}) == a);
}

TEST(JointGammaStep, NumericArgminAgreesWithMidpoint) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    auto p = random_problem(rng, path_graph(2), 4, 3.0, 1.0);
    const std::vector<Vector> th{random_vector(rng, 4), random_vector(rng, 4)};
    const Vector& lkl = p.duals.at({0, 1});
    const Vector& llk = p.duals.at({1, 0});
    // gradient descent on lkl.(th0 - g) + llk.(th1 - g) + rho/2 (|th0 - g|^2 + |th1 - g|^2)
    Vector g = Vector::Zero(4);
    for (int it = 0; it < 2000; ++it) {
      const Vector grad = -lkl - llk + p.rho * (2.0 * g - th[0] - th[1]);
      g -= grad / (4.0 * p.rho);
    }
    EXPECT_LE((g - 0.5 * (th[0] + th[1])).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((g - joint_gamma_step(p, th).at({0, 1})).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(EdgeDualStep, ConsensusLeavesDualsUnchanged) {
  std::mt19937_64 rng(5);
  auto p = random_problem(rng, star_graph(4), 4, 100.0, 10.0);
  const Vector c = random_vector(rng, 4);
  const std::vector<Vector> th(4, c);
  const auto gm = joint_gamma_step(p, th);
  const auto d = edge_dual_step(p, th, gm);
  for (const auto& [e, lam] : p.duals) EXPECT_TRUE(d.at(e) == lam);
  const auto dc = edge_dual_step_closed(p, th);
  for (const auto& [e, lam] : p.duals) EXPECT_LE((dc.at(e) - lam).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EdgeDualStep, GenericAndClosedFormsAgree) {
  std::mt19937_64 rng(6);
  auto p = random_problem(rng, complete_graph(4), 4, 100.0, 10.0);
  const auto th = joint_theta_step(p);
  const auto generic = edge_dual_step(p, th, joint_gamma_step(p, th));
  const auto closed = edge_dual_step_closed(p, th);
  for (const auto& [e, lam] : generic) EXPECT_LE((lam - closed.at(e)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EdgeForm, LockstepWithAggregatedDuals) {
  std::mt19937_64 rng(7);
  for (const Graph& g : {path_graph(3), star_graph(4), complete_graph(3), cycle_graph(5)}) {
    const std::size_t kc = g.num_nodes();
    auto p = JointStepProblem::zeros(g, 4, 100.0, 10.0);
    std::vector<KernelLearnerState> dist(kc, KernelLearnerState(4));
    for (int t = 1; t <= 100; ++t) {
      std::vector<Vector> z;
      std::vector<double> y;
      for (NodeId k = 0; k < kc; ++k) {
        z.push_back(unit(rng, 4));
        y.push_back(std::normal_distribution<double>(0.0, 1.0)(rng));
      }
      p.z = z;
      p.y = y;
      const auto th = joint_admm_step(p);
      dokl_round(dist, g, z, y, AdmmConfig{});
      for (NodeId k = 0; k < kc; ++k) {
        ASSERT_LE((th[k] - dist[k].theta).cwiseAbs().maxCoeff(), 1e-6) << "round " << t;
        ASSERT_LE((aggregated_dual(p, k) - dist[k].lambda).cwiseAbs().maxCoeff(), 1e-6) << "round " << t;
      }
      for (const auto& [e, lam] : p.duals) ASSERT_TRUE(lam == -p.duals.at({e.second, e.first}));
    }
  }
}

TEST(Hindsight, NoiselessRecovery) {
  const auto spec = make_synthetic_spec(0.05, 2, 5, 0.0, 8);
  const auto ds = synth_regression(spec, 2000, 9);
  const FeatureMap gen = spec.generator();
  std::vector<Vector> z;
  std::vector<double> y;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    z.push_back(gen(ds.x(i)));
    y.push_back(ds.y(i));
  }
  const auto best = hindsight_best(z, y);
  EXPECT_LE((best.theta - spec.true_theta).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(best.cumulative_loss, 1e-10);
}

TEST(Hindsight, SingleSampleMinimumNorm) {
  std::mt19937_64 rng(10);
  const std::vector<Vector> z{unit(rng, 8)};
  const std::vector<double> y{1.7};
  const auto best = hindsight_best(z, y);
  EXPECT_LE(std::abs(best.theta.dot(z[0]) - 1.7), 1e-6);
  // minimum-norm interpolant is parallel to z
  EXPECT_LE((best.theta - 1.7 * z[0]).norm(), 1e-6);
}

TEST(Hindsight, DuplicatedSampleLeavesSolution) {
  const auto spec = make_synthetic_spec(0.05, 2, 4, 0.1, 11);
  const auto ds = synth_regression(spec, 300, 12);
  const FeatureMap gen = spec.generator();
  std::vector<Vector> z;
  std::vector<double> y;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    z.push_back(gen(ds.x(i)));
    y.push_back(ds.y(i));
  }
  const auto once = hindsight_best(z, y);
  auto z2 = z;
  auto y2 = y;
  z2.insert(z2.end(), z.begin(), z.end());
  y2.insert(y2.end(), y.begin(), y.end());
  const auto twice = hindsight_best(z2, y2);
  EXPECT_LE((once.theta - twice.theta).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(twice.cumulative_loss, 2.0 * once.cumulative_loss, 1e-6);
  EXPECT_THROW(hindsight_best(std::vector<Vector>{}, std::vector<double>{}), ParameterError);
}

TEST(BestKernel, TieRuleAndSingleKernel) {
  EXPECT_EQ(lowest_argmin({0.3, 0.1, 0.1, 0.2}), 1u);
  EXPECT_EQ(lowest_argmin({0.5, 0.5}), 0u);
  EXPECT_THROW(lowest_argmin({}), ParameterError);

  ExperimentConfig c;
  c.num_nodes = 3;
  c.bandwidths = {0.5};
  c.synthetic.samples_per_learner = 50;
  c.master_seed = 3;
  const auto r = exhaustive_best_kernel(c);
  EXPECT_EQ(r.index, 0u);
  ASSERT_EQ(r.mean_final_mse.size(), 1u);
}
