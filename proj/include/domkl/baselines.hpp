#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "domkl/dokl.hpp"
#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"
#include "domkl/hedge.hpp"

namespace domkl {

// Centralized multiple-kernel learner: a server sees all K samples of a round,
// takes one mini-batch OGD step per kernel and runs a single Hedge.

enum class BatchLossAggregation { sum, mean };

struct ComklState {
  std::vector<Vector> thetas;
  Vector cumulative_loss;
  Vector weights;
  double eta_local = 0.25;
  double eta_global = 10.0;
  BatchLossAggregation aggregation = BatchLossAggregation::sum;

  ComklState() = default;
  ComklState(const FeatureMaps& maps, double eta_l, double eta_g,
             BatchLossAggregation agg = BatchLossAggregation::sum)
      : cumulative_loss(Vector::Zero(static_cast<Eigen::Index>(maps.size()))),
        weights(Vector::Constant(static_cast<Eigen::Index>(maps.size()),
                                 1.0 / static_cast<double>(maps.size()))),
        eta_local(eta_l), eta_global(eta_g), aggregation(agg) {
    if (maps.empty()) throw ParameterError("comkl: empty dictionary");
    if (!(eta_l > 0.0) || !(eta_g > 0.0)) throw ParameterError("comkl: learning rates must be positive");
    for (const auto& m : maps) thetas.push_back(Vector::Zero(static_cast<Eigen::Index>(m->output_dim())));
  }

  double predict(std::span<const Vector> z) const {
    double f = 0.0;
    for (std::size_t p = 0; p < thetas.size(); ++p)
      f += weights[static_cast<Eigen::Index>(p)] * thetas[p].dot(z[p]);
    return f;
  }
};

/// One centralized round. Returns the broadcast function's predictions on
/// the batch (made before the update), then applies
///   theta_p <- theta_p - (eta_l / K) sum_k 2 (theta_p^T z_p(x_k) - y_k) z_p(x_k).
inline std::vector<double> comkl_step(ComklState& state, std::span<const Vector> xs,
                                      std::span<const double> ys, const FeatureMaps& maps,
                                      std::size_t expected_batch) {
  if (xs.size() != expected_batch || ys.size() != expected_batch)
    throw ParameterError("comkl_step: batch size must equal the number of learners");
  if (maps.size() != state.thetas.size()) throw ParameterError("comkl_step: dictionary size mismatch");
  const std::size_t kb = xs.size();
  const std::size_t p_count = maps.size();
  std::vector<std::vector<Vector>> z(kb);
  for (std::size_t k = 0; k < kb; ++k)
    for (const auto& m : maps) z[k].push_back((*m)(xs[k]));

  std::vector<double> predictions(kb);
  for (std::size_t k = 0; k < kb; ++k) predictions[k] = state.predict(z[k]);

  Vector batch_loss = Vector::Zero(static_cast<Eigen::Index>(p_count));
  for (std::size_t p = 0; p < p_count; ++p) {
    Vector grad = Vector::Zero(state.thetas[p].size());
    for (std::size_t k = 0; k < kb; ++k) {
      const double pred = state.thetas[p].dot(z[k][p]);
      batch_loss[static_cast<Eigen::Index>(p)] += squared_loss(pred, ys[k]);
      grad += 2.0 * (pred - ys[k]) * z[k][p];
    }
    state.thetas[p] -= (state.eta_local / static_cast<double>(kb)) * grad;
  }
  if (state.aggregation == BatchLossAggregation::mean) batch_loss /= static_cast<double>(kb);
  state.cumulative_loss += batch_loss;
  state.weights = softmax(-state.cumulative_loss / state.eta_global);
  return predictions;
}

// Single-kernel diffusion baseline (adapt-then-combine OGD).

enum class CombinationRule { uniform_closed_neighborhood };

struct DiffusionState {
  Vector theta;
  double step_size = 0.25;
  CombinationRule rule = CombinationRule::uniform_closed_neighborhood;

  DiffusionState() = default;
  DiffusionState(std::size_t dim, double eta)
      : theta(Vector::Zero(static_cast<Eigen::Index>(dim))), step_size(eta) {
    if (eta < 0.0) throw ParameterError("diffusion step size must be non-negative");
  }
};

/// psi_k = theta_k - eta 2 (theta_k^T z_k - y_k) z_k, then
/// theta_k = average of psi over the closed neighborhood N_k + {k}.
inline void rff_dokl_step(std::vector<DiffusionState>& states, const Graph& g,
                          std::span<const Vector> xs, std::span<const double> ys,
                          const FeatureMap& fm) {
  const std::size_t kc = states.size();
  if (g.num_nodes() != kc || xs.size() != kc || ys.size() != kc)
    throw ParameterError("rff_dokl_step: one sample per node required");
  std::vector<Vector> psi(kc);
  for (std::size_t k = 0; k < kc; ++k) {
    const Vector z = fm(xs[k]);
    const double pred = states[k].theta.dot(z);
    psi[k] = states[k].theta - states[k].step_size * 2.0 * (pred - ys[k]) * z;
  }
  for (std::size_t k = 0; k < kc; ++k) {
    Vector acc = psi[k];
    for (NodeId l : g.neighbors(k)) acc += psi[l];
    states[k].theta = acc / static_cast<double>(g.degree(k) + 1);
  }
}

}  // namespace domkl
