#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "domkl/dokl.hpp"
#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"

namespace domkl {

/// Everything observed in one synchronous round.
struct RoundRecord {
  Vector labels;          // y_{k,t}
  Matrix cross;           // cross(k, l) = f_{l,t}(x_{k,t}); diagonal = own prediction
  Matrix kernel_losses;   // K x P prediction-time losses; empty when not tracked
  Matrix weights;         // K x P kernel weights used for the prediction; empty for single kernel
};

struct RunTrace {
  std::string algorithm;
  std::vector<std::vector<NodeId>> neighbors;
  std::vector<RoundRecord> rounds;

  std::size_t num_learners() const noexcept { return neighbors.size(); }
  std::size_t num_rounds() const noexcept { return rounds.size(); }
  double prediction(std::size_t t, std::size_t k) const {
    const auto i = static_cast<Eigen::Index>(k);
    return rounds.at(t).cross(i, i);
  }
  double label(std::size_t t, std::size_t k) const {
    return rounds.at(t).labels[static_cast<Eigen::Index>(k)];
  }

  friend bool operator==(const RunTrace& a, const RunTrace& b) {
    if (a.algorithm != b.algorithm || a.neighbors != b.neighbors || a.rounds.size() != b.rounds.size())
      return false;
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
      const auto& x = a.rounds[t];
      const auto& y = b.rounds[t];
      if (x.labels != y.labels || x.cross != y.cross || x.kernel_losses != y.kernel_losses ||
          x.weights != y.weights)
        return false;
    }
    return true;
  }
};

inline std::vector<std::vector<NodeId>> neighbor_lists(const Graph& g) {
  std::vector<std::vector<NodeId>> out;
  for (NodeId k = 0; k < g.num_nodes(); ++k) out.push_back(g.neighbors(k));
  return out;
}

/// Metric value per round t = 1..T (index t - 1).
struct MetricCurve {
  std::vector<double> values;
  std::string algorithm;
  std::uint64_t trial_seed = 0;

  std::size_t size() const noexcept { return values.size(); }
  double back() const { return values.back(); }
};

/// Running mean squared error over all learners and rounds so far; the
/// first round is reported as 1 by convention.
inline MetricCurve mse_curve(const RunTrace& trace) {
  MetricCurve c;
  c.algorithm = trace.algorithm;
  const std::size_t kc = trace.num_learners();
  double total = 0.0;
  for (std::size_t t = 0; t < trace.num_rounds(); ++t) {
    for (std::size_t k = 0; k < kc; ++k) total += squared_loss(trace.prediction(t, k), trace.label(t, k));
    c.values.push_back(t == 0 ? 1.0 : total / static_cast<double>((t + 1) * kc));
  }
  return c;
}

/// Running consensus violation: mean over rounds and ordered learner pairs
/// of (f_k(x_k) - f_l(x_k))^2; first round reported as 1.
inline MetricCurve cv_curve(const RunTrace& trace) {
  const std::size_t kc = trace.num_learners();
  if (kc < 2) throw ParameterError("cv_curve: consensus violation needs at least two learners");
  MetricCurve c;
  c.algorithm = trace.algorithm;
  double total = 0.0;
  for (std::size_t t = 0; t < trace.num_rounds(); ++t) {
    const Matrix& m = trace.rounds[t].cross;
    for (Eigen::Index k = 0; k < m.rows(); ++k)
      for (Eigen::Index l = 0; l < m.cols(); ++l)
        if (l != k) {
          const double d = m(k, k) - m(k, l);
          total += d * d;
        }
    c.values.push_back(t == 0 ? 1.0 : total / static_cast<double>((t + 1) * kc * (kc - 1)));
  }
  return c;
}

/// Per-learner cumulative loss gap to the hindsight comparator over the
/// first `horizon` rounds (0 = all). hindsight_losses(t, k) is the
/// comparator's loss on learner k's round-t sample.
inline Vector regret_accuracy(const RunTrace& trace, const Matrix& hindsight_losses,
                              std::size_t horizon = 0) {
  const std::size_t t_end = horizon ? horizon : trace.num_rounds();
  if (t_end > trace.num_rounds() || static_cast<std::size_t>(hindsight_losses.rows()) < t_end ||
      static_cast<std::size_t>(hindsight_losses.cols()) != trace.num_learners())
    throw ParameterError("regret_accuracy: hindsight losses do not match the trace");
  Vector r = Vector::Zero(static_cast<Eigen::Index>(trace.num_learners()));
  for (std::size_t t = 0; t < t_end; ++t)
    for (std::size_t k = 0; k < trace.num_learners(); ++k)
      r[static_cast<Eigen::Index>(k)] += squared_loss(trace.prediction(t, k), trace.label(t, k)) -
                                         hindsight_losses(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
  return r;
}

/// Per-learner sum over rounds of [sum_{l in N_k} (f_k(x_k) - f_l(x_k))]^2.
inline Vector regret_discrepancy(const RunTrace& trace, std::size_t horizon = 0) {
  const std::size_t t_end = horizon ? horizon : trace.num_rounds();
  if (t_end > trace.num_rounds()) throw ParameterError("regret_discrepancy: horizon beyond trace");
  Vector r = Vector::Zero(static_cast<Eigen::Index>(trace.num_learners()));
  for (std::size_t t = 0; t < t_end; ++t) {
    const Matrix& m = trace.rounds[t].cross;
    for (std::size_t k = 0; k < trace.num_learners(); ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      double s = 0.0;
      for (NodeId l : trace.neighbors[k]) s += m(ki, ki) - m(ki, static_cast<Eigen::Index>(l));
      r[ki] += s * s;
    }
  }
  return r;
}

}  // namespace domkl
