// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "domkl/cli.hpp"
#include "domkl/oracle.hpp"

using namespace domkl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// 1: distributed theta updates against the joint dense solve.
Outcome joint_decomposition() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (const Graph& g : {path_graph(3), star_graph(4), complete_graph(3)})
    for (std::size_t m : {1u, 2u}) {
      const FeatureMap fm(KernelSpec(1.0), 2, m, rng());
      auto p = JointStepProblem::zeros(g, fm.output_dim(), 100.0, 10.0);
      std::vector<KernelLearnerState> st(g.num_nodes(), KernelLearnerState(fm.output_dim()));
      for (int t = 0; t < 100; ++t) {
        for (NodeId k = 0; k < g.num_nodes(); ++k) {
          p.z[k] = fm(Vector{{u(rng), u(rng)}});
          p.y[k] = u(rng);
        }
        const auto joint = joint_admm_step(p);
        dokl_round(st, g, p.z, p.y, AdmmConfig{p.rho, p.eta_local});
        for (NodeId k = 0; k < g.num_nodes(); ++k)
          worst = std::max(worst, (joint[k] - st[k].theta).cwiseAbs().maxCoeff());
      }
    }
  const double secs = seconds_since(start);
  return {worst <= 1e-6 && secs < 5.0, "max deviation " + num(worst) + ", " + num(secs) + " s"};
}

// Shared setup for the regret criteria: single-kernel DOKL whose kernel
// matches the generator. Regrets are averaged per learner over a few trials.
struct RegretRun {
  std::vector<std::vector<double>> accuracy_per_T;     // [T index][learner] regret / T
  std::vector<std::vector<double>> discrepancy_per_T;  // [T index][learner] regret / T
  std::vector<double> ratio;                           // per learner, max over consecutive T pairs
  double final_cv = 0.0;                               // worst trial
  double secs = 0.0;
};

const std::vector<std::size_t> kHorizons = {500, 2000, 8000};
constexpr std::size_t kRegretTrials = 5;

const RegretRun& regret_run() {
  static const RegretRun run = [] {
    const auto start = Clock::now();
    ExperimentConfig cfg;
    cfg.num_nodes = 5;
    cfg.connection_prob = 0.5;
    cfg.master_seed = 1;
    cfg.synthetic.bandwidth = 1.0;
    cfg.synthetic.input_dim = 2;
    cfg.synthetic.noise_std = 0.05;
    cfg.synthetic.samples_per_learner = kHorizons.back();
    cfg.bandwidths = {1.0};
    cfg.algorithms = {Algorithm::dokl};
    cfg.dokl.kernel = 0;
    cfg.dokl.admm = AdmmConfig{100.0, 100.0};

    RegretRun out;
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(cfg.num_nodes));
    std::vector<Vector> acc(kHorizons.size(), zero), dis(kHorizons.size(), zero);
    for (std::size_t trial = 0; trial < kRegretTrials; ++trial) {
      const TrialResult r = run_trial(cfg, trial);
      const RunTrace& tr = r.traces.front();
      for (std::size_t i = 0; i < kHorizons.size(); ++i) {
        const auto horizon = kHorizons[i];
        TrialResult prefix;
        prefix.maps = r.maps;
        for (const auto& s : r.streams)
          prefix.streams.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(horizon));
        acc[i] += regret_accuracy(tr, hindsight_losses(prefix), horizon) / double(kRegretTrials);
        dis[i] += regret_discrepancy(tr, horizon) / double(kRegretTrials);
      }
      out.final_cv = std::max(out.final_cv, cv_curve(tr).back());
    }
    for (std::size_t i = 0; i < kHorizons.size(); ++i) {
      out.accuracy_per_T.emplace_back();
      out.discrepancy_per_T.emplace_back();
      for (Eigen::Index k = 0; k < zero.size(); ++k) {
        out.accuracy_per_T.back().push_back(acc[i][k] / static_cast<double>(kHorizons[i]));
        out.discrepancy_per_T.back().push_back(dis[i][k] / static_cast<double>(kHorizons[i]));
      }
    }
    for (Eigen::Index k = 0; k < zero.size(); ++k) {
      double worst = 0.0;
      for (std::size_t i = 1; i < acc.size(); ++i)
        worst = std::max(worst, acc[i - 1][k] > 0.0 ? acc[i][k] / acc[i - 1][k] : HUGE_VAL);
      out.ratio.push_back(worst);
    }
    out.secs = seconds_since(start);
    return out;
  }();
  return run;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> c;
  for (const auto& r : rows) c.push_back(r[k]);
  return c;
}

// 2: accuracy regret grows sublinearly for every learner.
Outcome accuracy_regret() {
  const auto& run = regret_run();
  bool ok = run.secs < 120.0;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < run.ratio.size(); ++k) {
    ok = ok && run.ratio[k] <= 2.5 && strictly_decreasing(column(run.accuracy_per_T, k));
    worst_ratio = std::max(worst_ratio, run.ratio[k]);
  }
  std::string per_t;
  for (std::size_t i = 0; i < kHorizons.size(); ++i)
    per_t += (i ? ", " : "") + std::to_string(kHorizons[i]) + ":" + num(run.accuracy_per_T[i].front());
  return {ok, "worst regret(4T)/regret(T) " + num(worst_ratio) + "; learner 0 regret/T " + per_t + "; " +
                  num(run.secs) + " s"};
}

// 3: discrepancy regret per round shrinks and the network reaches consensus.
Outcome discrepancy_regret() {
  const auto& run = regret_run();
  bool ok = run.final_cv <= 1e-2;
  for (std::size_t k = 0; k < run.ratio.size(); ++k) ok = ok && strictly_decreasing(column(run.discrepancy_per_T, k));
  std::string per_t;
  for (std::size_t i = 0; i < kHorizons.size(); ++i)
    per_t += (i ? ", " : "") + num(run.discrepancy_per_T[i].front());
  return {ok, "learner 0 regret_d/T " + per_t + "; worst trial CV(8000) " + num(run.final_cv)};
}

// DOMKL over the full dictionary on a 10-node network; rho = 1 keeps the
// consensus term from dominating the per-round step.
ExperimentConfig synthetic_domkl(std::size_t trials, std::uint64_t seed, double bandwidth, std::size_t dim) {
  ExperimentConfig cfg;
  cfg.num_nodes = 10;
  cfg.connection_prob = 0.5;
  cfg.trials = trials;
  cfg.master_seed = seed;
  cfg.synthetic.bandwidth = bandwidth;
  cfg.synthetic.input_dim = dim;
  cfg.synthetic.samples_per_learner = 1000;
  cfg.algorithms = {Algorithm::domkl};
  cfg.domkl.admm = AdmmConfig{1.0, 10.0};
  cfg.dokl.admm = cfg.domkl.admm;
  cfg.compute_regret = false;
  return cfg;
}

// 4: stronger coupling gives lower consensus violation.
Outcome rho_tradeoff() {
  std::vector<double> cv;
  for (double rho : {10.0, 100.0, 1000.0}) {
    auto cfg = synthetic_domkl(20, 4, 1.0, 2);
    cfg.domkl.admm.rho = rho;
    cv.push_back(run_experiment(cfg).of(Algorithm::domkl).final_cv());
  }
  return {strictly_decreasing(cv), "mean final CV at rho 10/100/1000: " + num(cv[0]) + ", " + num(cv[1]) + ", " + num(cv[2])};
}

// 5: the dictionary search finds the generating kernel and DOMKL tracks it.
Outcome best_kernel() {
  const std::size_t trials = 20;
  std::size_t found = 0, close = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    auto cfg = synthetic_domkl(1, 500 + i, 1e-2, 3);
    const auto best = exhaustive_best_kernel(cfg);
    if (std::abs(cfg.bandwidths[best.index] - 1e-2) <= 1e-12) ++found;
    const double domkl_mse = run_experiment(cfg).of(Algorithm::domkl).final_mse();
    const double dokl_mse = best.mean_final_mse[best.index];
    if (std::abs(domkl_mse - dokl_mse) <= 0.1 * dokl_mse) ++close;
  }
  const bool ok = found * 10 >= trials * 9 && close * 10 >= trials * 9;
  return {ok, "best kernel sigma^2=1e-2 in " + std::to_string(found) + "/20, DOMKL within 10% in " +
                  std::to_string(close) + "/20"};
}

// 6: network size barely moves the MSE and CV does not get worse.
Outcome network_size() {
  std::vector<double> mse, cv;
  for (std::size_t k : {5u, 10u, 20u}) {
    auto cfg = synthetic_domkl(10, 6, 1.0, 2);
    cfg.num_nodes = k;
    const auto s = run_experiment(cfg).of(Algorithm::domkl);
    mse.push_back(s.final_mse());
    cv.push_back(s.final_cv());
  }
  const double ratio = *std::max_element(mse.begin(), mse.end()) / *std::min_element(mse.begin(), mse.end());
  const bool ok = ratio <= 1.25 && cv[1] <= cv[0] && cv[2] <= cv[1];
  return {ok, "MSE max/min " + num(ratio) + "; CV at K=5/10/20: " + num(cv[0]) + ", " + num(cv[1]) + ", " + num(cv[2])};
}

// 7: the invariant suite behind `domkl validate`.
Outcome invariants() {
  const auto start = Clock::now();
  std::ostringstream out, err;
  const int code = cli::cmd_validate(out, err);
  const double secs = seconds_since(start);
  return {code == 0 && secs < 10.0, "exit " + std::to_string(code) + ", " + num(secs) + " s"};
}

// 8: random feature inner products approximate the Gaussian kernel.
Outcome rff_fidelity() {
  const KernelSpec spec(1.0);
  const FeatureMap fm(spec, 5, 2000, 8);
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, total = 0.0;
  for (int i = 0; i < 100; ++i) {
    Vector a(5), b(5);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double err = std::abs(fm(a).dot(fm(b)) - gaussian_kernel(spec, a, b));
    worst = std::max(worst, err);
    total += err;
  }
  const double mean = total / 100.0;
  return {worst <= 0.05 && mean <= 0.02, "max " + num(worst) + ", mean " + num(mean)};
}

// 9: single-learner Hedge over 8 experts with fixed loss means.
Outcome hedge_regret() {
  const std::size_t experts = 8, seeds = 20;
  const std::vector<std::size_t> horizons = {2000, 8000};
  std::vector<double> regret(horizons.size(), 0.0);
  for (std::size_t s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(900 + s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector means(experts);
    for (auto& m : means) m = u(rng);
    HedgeState h(experts, 10.0);
    double learner_loss = 0.0;
    std::size_t hi = 0;
    for (std::size_t t = 1; t <= horizons.back(); ++t) {
      Vector loss(experts);
      for (std::size_t p = 0; p < experts; ++p)
        loss[static_cast<Eigen::Index>(p)] = std::clamp(means[static_cast<Eigen::Index>(p)] + 0.2 * (u(rng) - 0.5), 0.0, 1.0);
      learner_loss += softmax(h.log_weight()).dot(loss);
      h = accumulate(h, loss);
      if (t == horizons[hi]) {
        regret[hi] += (learner_loss - h.cumulative_loss.minCoeff()) / static_cast<double>(seeds);
        ++hi;
      }
    }
  }
  const double ratio = regret[1] / regret[0];
  return {regret[0] > 0.0 && ratio <= 2.5,
          "mean regret T=2000 " + num(regret[0]) + ", T=8000 " + num(regret[1]) + ", ratio " + num(ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 joint_decomposition", joint_decomposition},
      {"2 accuracy_regret_sublinear", accuracy_regret},
      {"3 discrepancy_regret", discrepancy_regret},
      {"4 rho_tradeoff", rho_tradeoff},
      {"5 best_kernel_recovery", best_kernel},
      {"6 network_size_robustness", network_size},
      {"7 invariant_suite", invariants},
      {"8 rff_fidelity", rff_fidelity},
      {"9 hedge_regret", hedge_regret},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
