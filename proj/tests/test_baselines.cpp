#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "domkl/baselines.hpp"

using namespace domkl;

namespace {

FeatureMaps maps_for(std::vector<double> bw, std::size_t d, std::size_t m) {
  KernelDictionary dict;
  dict.shared_seed = 5;
  for (double b : bw) dict.specs.emplace_back(b);
  return build_dictionary_maps(dict, d, m);
}

Vector random_x(std::mt19937_64& rng, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(d);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST(Comkl, ZeroLabelsKeepZeroTheta) {
  const auto maps = maps_for({0.1, 1.0}, 2, 5);
  ComklState s(maps, 0.25, 10.0);
  std::mt19937_64 rng(1);
  const std::vector<Vector> xs{random_x(rng, 2), random_x(rng, 2), random_x(rng, 2)};
  const std::vector<double> ys(3, 0.0);
  comkl_step(s, xs, ys, maps, 3);
  for (const auto& t : s.thetas) EXPECT_TRUE(t.isZero(0.0));
  EXPECT_TRUE(s.weights.isApproxToConstant(0.5, 1e-15));
}

TEST(Comkl, SingleSampleMatchesPlainOgd) {
  const auto maps = maps_for({0.3, 3.0}, 3, 7);
  ComklState s(maps, 0.4, 10.0);
  std::vector<Vector> ref(2, Vector::Zero(14));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 40; ++t) {
    const std::vector<Vector> xs{random_x(rng, 3)};
    const std::vector<double> ys{xs[0].sum()};
    comkl_step(s, xs, ys, maps, 1);
    for (std::size_t p = 0; p < 2; ++p) {
      const Vector z = (*maps[p])(xs[0]);
      double pred = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) pred += ref[p][i] * z[i];
      ref[p] = ref[p] - 0.4 * 2.0 * (pred - ys[0]) * z;
      EXPECT_LE((s.thetas[p] - ref[p]).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(Comkl, HandComputedStep) {
  const auto maps = maps_for({1.0}, 1, 1);
  ComklState s(maps, 0.5, 10.0);
  s.thetas[0] << 1.0, 2.0;
  Vector x(1);
  x << 0.7;
  const Vector z = (*maps[0])(x);
  // theta^T z - y with y = 1
  const double r = z[0] + 2.0 * z[1] - 1.0;
  const std::vector<Vector> xs{x};
  const std::vector<double> ys{1.0};
  const auto pred = comkl_step(s, xs, ys, maps, 1);
  EXPECT_DOUBLE_EQ(pred[0], z[0] + 2.0 * z[1]);
  EXPECT_NEAR(s.thetas[0][0], 1.0 - 0.5 * 2.0 * r * z[0], 1e-15);
  EXPECT_NEAR(s.thetas[0][1], 2.0 - 0.5 * 2.0 * r * z[1], 1e-15);
  EXPECT_NEAR(s.cumulative_loss[0], r * r, 1e-15);
}

TEST(Comkl, BatchOrderDoesNotMatter) {
  const auto maps = maps_for({0.1, 1.0, 10.0}, 2, 6);
  ComklState a(maps, 0.25, 10.0), b(maps, 0.25, 10.0);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    std::vector<Vector> xs;
    std::vector<double> ys;
    for (int k = 0; k < 5; ++k) {
      xs.push_back(random_x(rng, 2));
      ys.push_back(xs.back()[0] * xs.back()[1]);
    }
    comkl_step(a, xs, ys, maps, 5);
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
    comkl_step(b, xs, ys, maps, 5);
  }
  for (std::size_t p = 0; p < 3; ++p) EXPECT_LE((a.thetas[p] - b.thetas[p]).norm(), 1e-12);
}

TEST(Comkl, BatchSizeAndAggregation) {
  const auto maps = maps_for({1.0}, 1, 2);
  ComklState s(maps, 0.25, 10.0);
  const std::vector<Vector> xs{Vector::Zero(1)};
  const std::vector<double> ys{0.0};
  EXPECT_THROW(comkl_step(s, xs, ys, maps, 2), ParameterError);

  ComklState sum(maps, 0.25, 10.0, BatchLossAggregation::sum);
  ComklState mean(maps, 0.25, 10.0, BatchLossAggregation::mean);
  const std::vector<Vector> two{Vector::Constant(1, 0.1), Vector::Constant(1, 0.9)};
  const std::vector<double> y2{1.0, -1.0};
  comkl_step(sum, two, y2, maps, 2);
  comkl_step(mean, two, y2, maps, 2);
  EXPECT_DOUBLE_EQ(sum.cumulative_loss[0], 2.0);
  EXPECT_DOUBLE_EQ(mean.cumulative_loss[0], 1.0);
}

TEST(RffDokl, ConsensusStaysIdentical) {
  const Graph g = cycle_graph(6);
  const auto fm = build_feature_map(KernelSpec(1.0), 2, 8, 3);
  std::vector<DiffusionState> s(6, DiffusionState(16, 0.25));
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Vector x = random_x(rng, 2);
    const std::vector<Vector> xs(6, x);
    const std::vector<double> ys(6, x.sum());
    rff_dokl_step(s, g, xs, ys, fm);
    for (const auto& st : s) ASSERT_TRUE(st.theta == s[0].theta);
  }
}

TEST(RffDokl, ZeroStepIsConvexAveraging) {
  const Graph g = path_graph(6);
  const auto fm = build_feature_map(KernelSpec(1.0), 1, 3, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<DiffusionState> s(6, DiffusionState(6, 0.0));
  for (auto& st : s)
    for (auto& v : st.theta) v = nd(rng);
  const std::vector<Vector> xs(6, Vector::Zero(1));
  const std::vector<double> ys(6, 0.0);
  auto spread = [&] {
    double worst = 0.0;
    for (const auto& a : s)
      for (const auto& b : s) worst = std::max(worst, (a.theta - b.theta).cwiseAbs().maxCoeff());
    return worst;
  };
  const double initial = spread();
  for (int t = 0; t < 500; ++t) {
    Vector lo = s[0].theta, hi = s[0].theta;
    for (const auto& st : s) {
      lo = lo.cwiseMin(st.theta);
      hi = hi.cwiseMax(st.theta);
    }
    rff_dokl_step(s, g, xs, ys, fm);
    for (const auto& st : s) {
      ASSERT_TRUE((st.theta.array() >= lo.array() - 1e-15).all());
      ASSERT_TRUE((st.theta.array() <= hi.array() + 1e-15).all());
    }
  }
  EXPECT_LT(spread(), 1e-6 * initial);
}

TEST(RffDokl, IsolatedNodesRunPlainOgd) {
  const Graph g(2, {});
  const auto fm = build_feature_map(KernelSpec(0.5), 2, 4, 8);
  std::vector<DiffusionState> s(2, DiffusionState(8, 0.3));
  Vector ref = Vector::Zero(8);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const std::vector<Vector> xs{random_x(rng, 2), random_x(rng, 2)};
    const std::vector<double> ys{xs[0][0], xs[1][0]};
    rff_dokl_step(s, g, xs, ys, fm);
    const Vector z = fm(xs[0]);
    ref -= 0.3 * 2.0 * (ref.dot(z) - ys[0]) * z;
    EXPECT_LE((s[0].theta - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(DiffusionState(4, -0.1), ParameterError);
}
