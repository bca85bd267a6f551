#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"

namespace domkl {

/// Exponential-weights state of one learner, kept in the log domain:
/// the unnormalized weight of kernel p is exp(-cumulative_loss[p] / eta_global).
struct HedgeState {
  double eta_global = 10.0;
  Vector cumulative_loss;
  Vector weights;

  HedgeState() = default;
  HedgeState(std::size_t num_kernels, double eta_g)
      : eta_global(eta_g),
        cumulative_loss(Vector::Zero(static_cast<Eigen::Index>(num_kernels))),
        weights(Vector::Constant(static_cast<Eigen::Index>(num_kernels),
                                 1.0 / static_cast<double>(num_kernels))) {
    if (num_kernels == 0) throw ParameterError("hedge: need at least one kernel");
    if (!(eta_g > 0.0)) throw ParameterError("hedge: eta_global must be positive");
  }

  /// log of the unnormalized local weight.
  Vector log_weight() const { return -cumulative_loss / eta_global; }
};

/// Normalized exp(scores) with max-subtraction.
inline Vector softmax(const Vector& scores) {
  const double top = scores.maxCoeff();
  Vector e = (scores.array() - top).exp();
  return e / e.sum();
}

inline HedgeState accumulate(HedgeState state, const Vector& instantaneous_losses) {
  if (instantaneous_losses.size() != state.cumulative_loss.size())
    throw ParameterError("hedge accumulate: loss vector has wrong length");
  if ((instantaneous_losses.array() < 0.0).any())
    throw ParameterError("hedge accumulate: losses must be non-negative");
  state.cumulative_loss += instantaneous_losses;
  return state;
}

/// Neighbor-product weights: softmax of -(own + sum of neighbor cumulative losses) / eta_g.
inline Vector combine_weights(const Vector& own_cumulative,
                              std::span<const Vector> neighbor_cumulatives, double eta_global) {
  Vector total = own_cumulative;
  for (const auto& n : neighbor_cumulatives) {
    if (n.size() != total.size()) throw ParameterError("combine_weights: length mismatch");
    total += n;
  }
  return softmax(-total / eta_global);
}

/// Log-domain message k -> l: own log weight plus every incoming log
/// message except the one received from l.
inline Vector outgoing_log_message(const Vector& own_log_w, NodeId recipient,
                                   std::span<const NodeId> neighbors,
                                   std::span<const Vector> incoming) {
  Vector m = own_log_w;
  for (std::size_t i = 0; i < neighbors.size(); ++i)
    if (neighbors[i] != recipient) m += incoming[i];
  return m;
}

/// Weights from own log weight and the incoming log messages. Both are
/// already divided by eta_g, so no learning rate appears here.
inline Vector mp_combine_weights(const Vector& own_log_w,
                                 std::span<const Vector> incoming_log_messages) {
  Vector score = own_log_w;
  for (const auto& m : incoming_log_messages) {
    if (m.size() != score.size()) throw ParameterError("mp_combine_weights: length mismatch");
    score += m;
  }
  return softmax(score);
}

/// Network-wide view of the message-passing state: one log message per
/// directed edge and kernel, initialised to 0 (message value 1).
class MessageBoard {
 public:
  MessageBoard() = default;
  MessageBoard(const Graph& g, std::size_t num_kernels) {
    for (auto [a, b] : g.edges()) {
      messages_.emplace(std::pair{a, b}, Vector::Zero(static_cast<Eigen::Index>(num_kernels)));
      messages_.emplace(std::pair{b, a}, Vector::Zero(static_cast<Eigen::Index>(num_kernels)));
    }
  }

  const Vector& message(NodeId from, NodeId to) const { return messages_.at({from, to}); }
  std::size_t size() const noexcept { return messages_.size(); }

  /// Incoming log messages of node k, in neighbor order.
  std::vector<Vector> incoming(const Graph& g, NodeId k) const {
    std::vector<Vector> in;
    for (NodeId l : g.neighbors(k)) in.push_back(message(l, k));
    return in;
  }

  friend MessageBoard mp_update_messages(const MessageBoard& board, const Graph& graph,
                                         std::span<const Vector> latest_log_w,
                                         bool allow_cycles);

 private:
  std::map<std::pair<NodeId, NodeId>, Vector> messages_;
};

/// One synchronous message round. Throws ApplicabilityError on graphs with
/// cycles unless `allow_cycles` is set, in which case losses circulating
/// around a cycle get counted more than once.
inline MessageBoard mp_update_messages(const MessageBoard& board, const Graph& graph,
                                       std::span<const Vector> latest_log_w,
                                       bool allow_cycles = false) {
  if (!allow_cycles && !is_forest(graph))
    throw ApplicabilityError("message passing requires an acyclic graph");
  if (latest_log_w.size() != graph.num_nodes())
    throw ParameterError("mp_update_messages: one log weight vector per node required");
  MessageBoard next = board;
  for (NodeId k = 0; k < graph.num_nodes(); ++k) {
    const auto& nbrs = graph.neighbors(k);
    const auto in = board.incoming(graph, k);
    for (NodeId l : nbrs)
      next.messages_.at({k, l}) = outgoing_log_message(latest_log_w[k], l, nbrs, in);
  }
  return next;
}

}  // namespace domkl
