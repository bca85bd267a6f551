#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "domkl/baselines.hpp"
#include "domkl/data.hpp"
#include "domkl/dokl.hpp"
#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"
#include "domkl/hedge.hpp"
#include "domkl/hindsight.hpp"
#include "domkl/learner.hpp"
#include "domkl/metrics.hpp"
#include "domkl/random.hpp"

namespace domkl {

enum class TaskKind { regression, timeseries, synthetic };
enum class Algorithm { domkl, dokl, comkl, rff_dokl };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::domkl: return "domkl";
    case Algorithm::dokl: return "dokl";
    case Algorithm::comkl: return "comkl";
    case Algorithm::rff_dokl: return "rff_dokl";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::domkl, Algorithm::dokl, Algorithm::comkl, Algorithm::rff_dokl})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

/// Random-feature regression task; labels y = theta*^T z(x) + noise.
struct SyntheticTaskSpec {
  double bandwidth = 1.0;
  std::size_t input_dim = 1;
  std::size_t generator_features = 50;
  double noise_std = 0.05;
  std::size_t samples_per_learner = 1000;
};

struct DataSource {
  std::string path;             // CSV; empty with a timeseries task means a synthetic AR series
  std::size_t label_column = 0;
  bool has_header = false;
  bool normalize = true;
  std::size_t ar_order = 5;     // lag embedding for timeseries tasks
  ARSpec ar;                    // generator when path is empty
  std::size_t series_length = 0;
};

struct DomklParams {
  AdmmConfig admm;
  double eta_global = 10.0;
  HedgeVariant variant = HedgeVariant::product;
  bool allow_cycles = false;
};

struct DoklParams {
  AdmmConfig admm;
  std::size_t kernel = 8;  // 0-based dictionary index; 8 is sigma^2 = 1 in the default dictionary
};

struct ComklParams {
  double eta_local = 0.25;
  double eta_global = 10.0;
  BatchLossAggregation aggregation = BatchLossAggregation::sum;
};

struct RffDoklParams {
  double step_size = 0.25;
  std::size_t kernel = 8;
};

inline std::vector<double> default_bandwidths() {
  std::vector<double> b;
  for (const auto& s : default_dictionary().specs) b.push_back(s.bandwidth);
  return b;
}

struct ExperimentConfig {
  TaskKind task = TaskKind::synthetic;
  SyntheticTaskSpec synthetic;
  DataSource data;

  std::size_t num_nodes = 10;
  double connection_prob = 0.5;
  std::optional<Graph> topology;  // fixed graph instead of Erdos-Renyi draws
  std::size_t max_graph_attempts = 1000;

  std::vector<Algorithm> algorithms{Algorithm::domkl};
  DomklParams domkl;
  DoklParams dokl;
  ComklParams comkl;
  RffDoklParams rff_dokl;

  std::size_t num_features = 50;
  std::vector<double> bandwidths = default_bandwidths();

  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::size_t threads = 0;         // 0: DOMKL_THREADS or 1
  std::uint64_t schedule_seed = 0; // non-zero: shuffle intra-round node order
  bool compute_regret = true;

  void validate() const {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (num_nodes < 2) throw ParameterError("num_nodes must be >= 2");
    if (topology && topology->num_nodes() != num_nodes)
      throw ParameterError("fixed topology has " + std::to_string(topology->num_nodes()) +
                           " nodes, expected " + std::to_string(num_nodes));
    if (!topology && !(connection_prob > 0.0 && connection_prob <= 1.0))
      throw ParameterError("connection_prob must lie in (0, 1]");
    if (algorithms.empty()) throw ParameterError("no algorithms selected");
    if (bandwidths.empty()) throw ParameterError("kernel dictionary is empty");
    if (num_features < 1) throw ParameterError("num_features must be >= 1");
    const auto uses = [&](Algorithm a) { return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end(); };
    if (uses(Algorithm::dokl) && dokl.kernel >= bandwidths.size()) throw ParameterError("dokl kernel index outside dictionary");
    if (uses(Algorithm::rff_dokl) && rff_dokl.kernel >= bandwidths.size()) throw ParameterError("rff_dokl kernel index outside dictionary");
    domkl.admm.validate();
    dokl.admm.validate();
    if (!(domkl.eta_global > 0.0)) throw ParameterError("domkl eta_global must be positive");
    if (task == TaskKind::synthetic && synthetic.samples_per_learner < 1)
      throw ParameterError("samples_per_learner must be >= 1");
    if (task != TaskKind::synthetic && task != TaskKind::timeseries && data.path.empty())
      throw ParameterError("regression task needs a data path");
  }
};


/// Everything one trial produced; algorithms share graph, maps and streams.
struct TrialResult {
  std::size_t trial_index = 0;
  Graph graph;
  std::size_t graph_attempts = 0;
  FeatureMaps maps;
  std::vector<Stream> streams;
  std::vector<RunTrace> traces;  // in cfg.algorithms order
};

namespace detail {

inline std::vector<std::size_t> schedule(std::size_t n, std::mt19937_64* rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (rng) std::shuffle(order.begin(), order.end(), *rng);
  return order;
}

inline std::size_t rounds_of(const std::vector<Stream>& streams) {
  std::size_t t = streams.front().size();
  for (const auto& s : streams) t = std::min(t, s.size());
  return t;
}

inline std::unique_ptr<std::mt19937_64> schedule_rng(std::uint64_t seed) {
  return seed ? std::make_unique<std::mt19937_64>(seed) : nullptr;
}

}  // namespace detail

/// Decentralized multiple-kernel run. Each round: record cross predictions,
/// local steps (any node order), exchange, weight and dual updates.
inline RunTrace run_domkl(const Graph& g, const FeatureMaps& maps, const std::vector<Stream>& streams,
                          const DomklParams& params, std::uint64_t schedule_seed = 0) {
  auto nodes = make_learners(g, maps, params.eta_global, params.variant, params.allow_cycles);
  const std::size_t kc = g.num_nodes();
  const std::size_t pc = maps.size();
  const std::size_t t_len = detail::rounds_of(streams);
  auto rng = detail::schedule_rng(schedule_seed);
  RunTrace trace;
  trace.algorithm = "domkl";
  trace.neighbors = neighbor_lists(g);
  std::vector<RoundExchange> sent(kc);
  std::vector<std::vector<Vector>> z(kc);
  for (std::size_t t = 0; t < t_len; ++t) {
    RoundRecord rec;
    rec.labels.resize(static_cast<Eigen::Index>(kc));
    rec.cross.resize(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(kc));
    rec.weights.resize(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(pc));
    rec.kernel_losses.resize(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(pc));
    for (std::size_t k = 0; k < kc; ++k) {
      z[k] = nodes[k].features(streams[k][t].x);
      rec.labels[static_cast<Eigen::Index>(k)] = streams[k][t].y;
      rec.weights.row(static_cast<Eigen::Index>(k)) = nodes[k].weights().transpose();
    }
    for (std::size_t k = 0; k < kc; ++k)
      for (std::size_t l = 0; l < kc; ++l)
        rec.cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = nodes[l].predict_features(z[k]);
    for (std::size_t k : detail::schedule(kc, rng.get())) {
      auto res = nodes[k].step_features(z[k], streams[k][t].y, params.admm, params.variant);
      rec.kernel_losses.row(static_cast<Eigen::Index>(k)) = res.per_kernel_losses.transpose();
      sent[k] = std::move(res.outgoing);
    }
    for (std::size_t k : detail::schedule(kc, rng.get())) {
      std::vector<RoundExchange> inbox;
      for (NodeId l : g.neighbors(k)) inbox.push_back(sent[l]);
      nodes[k].complete_round(inbox, params.admm, params.variant);
    }
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

/// Single-kernel decentralized run (online ADMM, one dictionary kernel).
inline RunTrace run_dokl(const Graph& g, const FeatureMap& fm, const std::vector<Stream>& streams,
                         const AdmmConfig& admm) {
  const std::size_t kc = g.num_nodes();
  const std::size_t t_len = detail::rounds_of(streams);
  std::vector<KernelLearnerState> states(kc, KernelLearnerState(fm.output_dim()));
  RunTrace trace;
  trace.algorithm = "dokl";
  trace.neighbors = neighbor_lists(g);
  std::vector<Vector> z(kc);
  std::vector<double> y(kc);
  for (std::size_t t = 0; t < t_len; ++t) {
    RoundRecord rec;
    rec.labels.resize(static_cast<Eigen::Index>(kc));
    rec.cross.resize(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(kc));
    rec.kernel_losses.resize(static_cast<Eigen::Index>(kc), 1);
    for (std::size_t k = 0; k < kc; ++k) {
      z[k] = fm(streams[k][t].x);
      y[k] = streams[k][t].y;
      rec.labels[static_cast<Eigen::Index>(k)] = y[k];
    }
    for (std::size_t k = 0; k < kc; ++k) {
      for (std::size_t l = 0; l < kc; ++l)
        rec.cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = predict(states[l].theta, z[k]);
      rec.kernel_losses(static_cast<Eigen::Index>(k), 0) = squared_loss(rec.cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), y[k]);
    }
    dokl_round(states, g, z, y, admm);
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

/// Centralized run: every learner predicts with the broadcast function.
inline RunTrace run_comkl(const Graph& g, const FeatureMaps& maps, const std::vector<Stream>& streams,
                          const ComklParams& params) {
  const std::size_t kc = g.num_nodes();
  const std::size_t t_len = detail::rounds_of(streams);
  ComklState state(maps, params.eta_local, params.eta_global, params.aggregation);
  RunTrace trace;
  trace.algorithm = "comkl";
  trace.neighbors = neighbor_lists(g);
  std::vector<Vector> xs(kc);
  std::vector<double> ys(kc);
  for (std::size_t t = 0; t < t_len; ++t) {
    RoundRecord rec;
    rec.labels.resize(static_cast<Eigen::Index>(kc));
    rec.cross.resize(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(kc));
    rec.weights = state.weights.transpose().replicate(static_cast<Eigen::Index>(kc), 1);
    for (std::size_t k = 0; k < kc; ++k) {
      xs[k] = streams[k][t].x;
      ys[k] = streams[k][t].y;
      rec.labels[static_cast<Eigen::Index>(k)] = ys[k];
    }
    const auto preds = comkl_step(state, xs, ys, maps, kc);
    for (std::size_t k = 0; k < kc; ++k) rec.cross.row(static_cast<Eigen::Index>(k)).setConstant(preds[k]);
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

/// Single-kernel diffusion OGD run.
inline RunTrace run_rff_dokl(const Graph& g, const FeatureMap& fm, const std::vector<Stream>& streams,
                             const RffDoklParams& params) {
  const std::size_t kc = g.num_nodes();
  const std::size_t t_len = detail::rounds_of(streams);
  std::vector<DiffusionState> states(kc, DiffusionState(fm.output_dim(), params.step_size));
  RunTrace trace;
  trace.algorithm = "rff_dokl";
  trace.neighbors = neighbor_lists(g);
  std::vector<Vector> xs(kc);
  std::vector<double> ys(kc);
  for (std::size_t t = 0; t < t_len; ++t) {
    RoundRecord rec;
    rec.labels.resize(static_cast<Eigen::Index>(kc));
    rec.cross.resize(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(kc));
    for (std::size_t k = 0; k < kc; ++k) {
      xs[k] = streams[k][t].x;
      ys[k] = streams[k][t].y;
      rec.labels[static_cast<Eigen::Index>(k)] = ys[k];
      const Vector zk = fm(xs[k]);
      for (std::size_t l = 0; l < kc; ++l)
        rec.cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = states[l].theta.dot(zk);
    }
    rff_dokl_step(states, g, xs, ys, fm);
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

/// Loads, scales and (for time series) lag-embeds the configured data.
/// Synthetic regression data depends on the trial and is built in run_trial.
inline std::shared_ptr<const Dataset> prepare_dataset(const ExperimentConfig& cfg) {
  if (cfg.task == TaskKind::synthetic) return nullptr;
  if (cfg.task == TaskKind::timeseries) {
    std::vector<double> series;
    if (cfg.data.path.empty()) {
      series = synth_ar(cfg.data.ar, cfg.data.series_length,
                        derive_seed(cfg.master_seed, 0, SeedStream::noise));
    } else {
      series = to_series(load_csv(cfg.data.path, cfg.data.label_column, cfg.data.has_header).labels);
    }
    if (cfg.data.normalize) {
      const double lo = *std::min_element(series.begin(), series.end());
      const double hi = *std::max_element(series.begin(), series.end());
      for (auto& v : series) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    }
    return std::make_shared<const Dataset>(ar_embed(series, cfg.data.ar_order));
  }
  Dataset ds = load_csv(cfg.data.path, cfg.data.label_column, cfg.data.has_header);
  if (cfg.data.normalize) ds = normalize_minmax(ds);
  return std::make_shared<const Dataset>(std::move(ds));
}

/// Runs every configured algorithm once on a shared graph, dictionary maps
/// and data partition. All randomness derives from (master_seed, trial_index).
inline TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index,
                             std::shared_ptr<const Dataset> dataset = nullptr) {
  cfg.validate();
  TrialResult r;
  r.trial_index = trial_index;
  const std::uint64_t ms = cfg.master_seed;
  if (cfg.topology) {
    r.graph = *cfg.topology;
  } else {
    auto s = sample_connected_er(cfg.num_nodes, cfg.connection_prob,
                                 derive_seed(ms, trial_index, SeedStream::graph), cfg.max_graph_attempts);
    r.graph = std::move(s.graph);
    r.graph_attempts = s.attempts;
  }
  const std::size_t kc = cfg.num_nodes;

  KernelDictionary dict;
  dict.shared_seed = derive_seed(ms, trial_index, SeedStream::features);
  for (double b : cfg.bandwidths) dict.specs.emplace_back(b);

  if (cfg.task == TaskKind::synthetic) {
    const auto& sy = cfg.synthetic;
    auto spec = make_synthetic_spec(sy.bandwidth, sy.input_dim, sy.generator_features, sy.noise_std,
                                    derive_seed(ms, trial_index, SeedStream::truth));
    // When the dictionary holds the generating kernel, the target lives in
    // that kernel's feature space: generator and learners share the map.
    if (sy.generator_features == cfg.num_features)
      for (std::size_t p = 0; p < dict.size(); ++p)
        if (dict.specs[p].bandwidth == sy.bandwidth) {
          spec.seed = dict.shared_seed + p;
          break;
        }
    const Dataset ds = synth_regression(spec, kc * sy.samples_per_learner,
                                        derive_seed(ms, trial_index, SeedStream::noise));
    r.streams = partition_regression(ds, kc);
  } else {
    if (!dataset) dataset = prepare_dataset(cfg);
    if (dataset->size() < kc) throw ParameterError("dataset has fewer samples than learners");
    r.streams = cfg.task == TaskKind::timeseries ? partition_timeseries_interleaved(*dataset, kc)
                                                 : partition_regression(*dataset, kc);
  }

  r.maps = build_dictionary_maps(dict, r.streams.front().front().x.size(), cfg.num_features);

  const std::uint64_t sched = cfg.schedule_seed ? mix_seed(cfg.schedule_seed ^ trial_index) : 0;
  for (Algorithm a : cfg.algorithms) {
    switch (a) {
      case Algorithm::domkl:
        r.traces.push_back(run_domkl(r.graph, r.maps, r.streams, cfg.domkl, sched));
        break;
      case Algorithm::dokl:
        r.traces.push_back(run_dokl(r.graph, *r.maps[cfg.dokl.kernel], r.streams, cfg.dokl.admm));
        break;
      case Algorithm::comkl:
        r.traces.push_back(run_comkl(r.graph, r.maps, r.streams, cfg.comkl));
        break;
      case Algorithm::rff_dokl:
        r.traces.push_back(run_rff_dokl(r.graph, *r.maps[cfg.rff_dokl.kernel], r.streams, cfg.rff_dokl));
        break;
    }
  }
  return r;
}

/// Per (t, k) squared loss of the best single-kernel function in hindsight:
/// pooled least squares per dictionary kernel, keeping the kernel with the
/// lowest pooled loss.
inline Matrix hindsight_losses(const TrialResult& r) {
  const std::size_t kc = r.streams.size();
  const std::size_t t_len = detail::rounds_of(r.streams);
  Matrix best;
  double best_total = std::numeric_limits<double>::infinity();
  for (const auto& fm : r.maps) {
    HindsightAccumulator acc(fm->output_dim());
    std::vector<Vector> z;
    z.reserve(kc * t_len);
    for (std::size_t t = 0; t < t_len; ++t)
      for (std::size_t k = 0; k < kc; ++k) {
        z.push_back((*fm)(r.streams[k][t].x));
        acc.add(z.back(), r.streams[k][t].y);
      }
    const Vector theta = acc.solve();
    Matrix losses(static_cast<Eigen::Index>(t_len), static_cast<Eigen::Index>(kc));
    double total = 0.0;
    for (std::size_t t = 0; t < t_len; ++t)
      for (std::size_t k = 0; k < kc; ++k) {
        const double l = squared_loss(theta.dot(z[t * kc + k]), r.streams[k][t].y);
        losses(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = l;
        total += l;
      }
    if (total < best_total) {
      best_total = total;
      best = std::move(losses);
    }
  }
  return best;
}

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::domkl;
  std::vector<double> mse_mean, mse_std, cv_mean, cv_std;
  double regret_accuracy_mean = 0.0;     // final, averaged over learners and trials
  double regret_discrepancy_mean = 0.0;
  std::vector<double> final_mse_per_trial, final_cv_per_trial;

  double final_mse() const { return mse_mean.back(); }
  double final_cv() const { return cv_mean.back(); }
};

struct AggregateResult {
  std::size_t trials = 0;
  std::vector<AlgorithmSummary> algorithms;

  const AlgorithmSummary& of(Algorithm a) const {
    for (const auto& s : algorithms)
      if (s.algorithm == a) return s;
    throw ParameterError("algorithm " + to_string(a) + " was not run");
  }
};

/// Per-trial reduction kept by run_experiment (traces are dropped early).
struct TrialCurves {
  std::vector<MetricCurve> mse, cv;
  std::vector<double> regret_a, regret_d;
};

inline TrialCurves reduce_trial(const ExperimentConfig& cfg, const TrialResult& r) {
  TrialCurves c;
  Matrix hind;
  if (cfg.compute_regret) hind = hindsight_losses(r);
  for (const auto& tr : r.traces) {
    c.mse.push_back(mse_curve(tr));
    c.cv.push_back(cv_curve(tr));
    c.regret_d.push_back(regret_discrepancy(tr).mean());
    c.regret_a.push_back(cfg.compute_regret ? regret_accuracy(tr, hind).mean() : 0.0);
  }
  return c;
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("DOMKL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

/// Runs all trials (in parallel when threads > 1) and aggregates curves in
/// trial-index order, so results do not depend on scheduling.
inline AggregateResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dataset = prepare_dataset(cfg);
  std::vector<TrialCurves> per_trial(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.trials; i = next++) {
      try {
        per_trial[i] = reduce_trial(cfg, run_trial(cfg, i, dataset));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(resolve_threads(cfg.threads), cfg.trials);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw TrialError(i, e.what());
    }
  }

  AggregateResult out;
  out.trials = cfg.trials;
  const double n = static_cast<double>(cfg.trials);
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    AlgorithmSummary s;
    s.algorithm = cfg.algorithms[a];
    const std::size_t t_len = per_trial.front().mse[a].size();
    auto stats = [&](auto pick, std::vector<double>& mean, std::vector<double>& sd) {
      mean.assign(t_len, 0.0);
      sd.assign(t_len, 0.0);
      for (const auto& tc : per_trial)
        for (std::size_t t = 0; t < t_len; ++t) mean[t] += pick(tc).values[t] / n;
      if (cfg.trials > 1) {
        for (const auto& tc : per_trial)
          for (std::size_t t = 0; t < t_len; ++t) {
            const double d = pick(tc).values[t] - mean[t];
            sd[t] += d * d / (n - 1.0);
          }
        for (auto& v : sd) v = std::sqrt(v);
      }
    };
    stats([a](const TrialCurves& tc) -> const MetricCurve& { return tc.mse[a]; }, s.mse_mean, s.mse_std);
    stats([a](const TrialCurves& tc) -> const MetricCurve& { return tc.cv[a]; }, s.cv_mean, s.cv_std);
    for (const auto& tc : per_trial) {
      s.regret_accuracy_mean += tc.regret_a[a] / n;
      s.regret_discrepancy_mean += tc.regret_d[a] / n;
      s.final_mse_per_trial.push_back(tc.mse[a].back());
      s.final_cv_per_trial.push_back(tc.cv[a].back());
    }
    out.algorithms.push_back(std::move(s));
  }
  return out;
}

struct SweepRow {
  double eta_global = 0.0;
  double rho = 0.0;
  Algorithm algorithm = Algorithm::domkl;
  double final_mse = 0.0;
  double final_cv = 0.0;
};

/// Full experiment per grid cell; rows ordered by (eta_g, rho), then by the
/// configured algorithm order. rho applies to both ADMM learners, eta_g to
/// both Hedge learners.
inline std::vector<SweepRow> sweep(const ExperimentConfig& cfg, std::vector<double> rhos,
                                   std::vector<double> eta_gs) {
  std::sort(rhos.begin(), rhos.end());
  std::sort(eta_gs.begin(), eta_gs.end());
  std::vector<SweepRow> rows;
  for (double eg : eta_gs)
    for (double rho : rhos) {
      ExperimentConfig c = cfg;
      c.domkl.admm.rho = rho;
      c.dokl.admm.rho = rho;
      c.domkl.eta_global = eg;
      c.comkl.eta_global = eg;
      const auto res = run_experiment(c);
      for (const auto& s : res.algorithms) rows.push_back({eg, rho, s.algorithm, s.final_mse(), s.final_cv()});
    }
  return rows;
}

}  // namespace domkl
