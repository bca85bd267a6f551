#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "domkl/dokl.hpp"
#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/graph.hpp"
#include "domkl/hedge.hpp"

namespace domkl {

enum class HedgeVariant { product, message_passing };

/// What a learner sends its neighbors after a local step: its new kernel
/// parameters and its cumulative per-kernel losses (the log-domain form of
/// the local Hedge weights). Under message passing it also carries one log
/// message per recipient. No raw samples are ever included.
struct RoundExchange {
  NodeId sender = 0;
  std::vector<Vector> thetas;
  Vector cumulative_losses;
  std::vector<std::pair<NodeId, Vector>> log_messages;

  const Vector* message_for(NodeId recipient) const {
    for (const auto& [to, m] : log_messages)
      if (to == recipient) return &m;
    return nullptr;
  }
};

namespace detail {
inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_f64(std::vector<std::uint8_t>& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}
inline void put_vec(std::vector<std::uint8_t>& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint64_t u64() {
    if (pos_ + 8 > in_.size()) throw ParseError("exchange: truncated buffer", 0, pos_);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Vector vec(std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = f64();
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};
}  // namespace detail

/// Canonical little-endian encoding, all fields 8 bytes:
///   u64 sender, u64 P, u64 D (= 2M),
///   P x D f64 thetas (kernel-major), P f64 cumulative losses,
///   u64 N messages, then N x (u64 recipient, P f64 log message).
inline std::vector<std::uint8_t> serialize(const RoundExchange& ex) {
  std::vector<std::uint8_t> out;
  const std::size_t p = ex.thetas.size();
  const std::size_t d = p ? static_cast<std::size_t>(ex.thetas.front().size()) : 0;
  detail::put_u64(out, ex.sender);
  detail::put_u64(out, p);
  detail::put_u64(out, d);
  for (const auto& t : ex.thetas) {
    if (static_cast<std::size_t>(t.size()) != d)
      throw ParameterError("serialize: ragged theta vectors");
    detail::put_vec(out, t);
  }
  if (static_cast<std::size_t>(ex.cumulative_losses.size()) != p)
    throw ParameterError("serialize: cumulative loss length differs from kernel count");
  detail::put_vec(out, ex.cumulative_losses);
  detail::put_u64(out, ex.log_messages.size());
  for (const auto& [to, m] : ex.log_messages) {
    detail::put_u64(out, to);
    detail::put_vec(out, m);
  }
  return out;
}

inline RoundExchange deserialize_exchange(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  RoundExchange ex;
  ex.sender = r.u64();
  const auto p = r.u64();
  const auto d = r.u64();
  for (std::uint64_t i = 0; i < p; ++i) ex.thetas.push_back(r.vec(d));
  ex.cumulative_losses = r.vec(p);
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto to = r.u64();
    ex.log_messages.emplace_back(to, r.vec(p));
  }
  if (!r.done()) throw ParseError("exchange: trailing bytes", 0);
  return ex;
}

/// One learner of the decentralized multiple-kernel algorithm.
class LearnerNode {
 public:
  LearnerNode(NodeId id, std::vector<NodeId> neighbors, FeatureMaps maps, double eta_global)
      : id_(id), neighbors_(std::move(neighbors)), maps_(std::move(maps)),
        hedge_(maps_.size(), eta_global) {
    if (maps_.empty()) throw ParameterError("learner needs at least one feature map");
    const std::size_t p = maps_.size();
    for (const auto& m : maps_) {
      if (m->input_dim() != maps_.front()->input_dim())
        throw ParameterError("feature maps disagree on input dimension");
      kernels_.emplace_back(m->output_dim());
    }
    neighbor_thetas_.assign(neighbors_.size(), {});
    for (auto& per_kernel : neighbor_thetas_)
      for (const auto& m : maps_) per_kernel.push_back(Vector::Zero(static_cast<Eigen::Index>(m->output_dim())));
    incoming_.assign(neighbors_.size(), Vector::Zero(static_cast<Eigen::Index>(p)));
  }

  NodeId id() const noexcept { return id_; }
  const std::vector<NodeId>& neighbors() const noexcept { return neighbors_; }
  std::size_t num_kernels() const noexcept { return maps_.size(); }
  const FeatureMaps& feature_maps() const noexcept { return maps_; }
  const std::vector<KernelLearnerState>& kernel_states() const noexcept { return kernels_; }
  const HedgeState& hedge() const noexcept { return hedge_; }
  const Vector& weights() const noexcept { return hedge_.weights; }

  /// Maps x through every dictionary kernel.
  std::vector<Vector> features(const Vector& x) const {
    std::vector<Vector> z;
    z.reserve(maps_.size());
    for (const auto& m : maps_) z.push_back((*m)(x));
    return z;
  }

  /// sum_p q_p theta_p^T z_p for precomputed features.
  double predict_features(std::span<const Vector> z) const {
    double f = 0.0;
    for (std::size_t p = 0; p < maps_.size(); ++p)
      f += hedge_.weights[static_cast<Eigen::Index>(p)] * kernels_[p].theta.dot(z[p]);
    return f;
  }

  double predict_combined(const Vector& x) const { return predict_features(features(x)); }

  struct StepResult {
    double prediction = 0.0;
    Vector per_kernel_losses;
    RoundExchange outgoing;
  };

  /// Local half of a round: predict with the current state, score every
  /// kernel, take the theta steps against last round's neighbor thetas,
  /// accumulate losses and build the outgoing exchange.
  StepResult step(const Vector& x, double label, const AdmmConfig& cfg,
                  HedgeVariant variant = HedgeVariant::product) {
    const auto z = features(x);
    return step_features(z, label, cfg, variant);
  }

  /// step() with the sample already mapped through every kernel.
  StepResult step_features(std::span<const Vector> z, double label, const AdmmConfig& cfg,
                           HedgeVariant variant = HedgeVariant::product) {
    if (z.size() != maps_.size()) throw ParameterError("step: one feature vector per kernel required");
    StepResult out;
    out.prediction = predict_features(z);
    const std::size_t p_count = maps_.size();
    out.per_kernel_losses.resize(static_cast<Eigen::Index>(p_count));
    std::vector<Vector> nbr(neighbors_.size());
    for (std::size_t p = 0; p < p_count; ++p) {
      auto& s = kernels_[p];
      out.per_kernel_losses[static_cast<Eigen::Index>(p)] = squared_loss(s.theta.dot(z[p]), label);
      for (std::size_t i = 0; i < neighbors_.size(); ++i) nbr[i] = neighbor_thetas_[i][p];
      const Vector gamma = gamma_hat(s.theta, nbr);
      s.theta = theta_update_quadratic(s, z[p], label, gamma, neighbors_.size(), cfg);
    }
    hedge_ = accumulate(std::move(hedge_), out.per_kernel_losses);

    out.outgoing.sender = id_;
    for (const auto& s : kernels_) out.outgoing.thetas.push_back(s.theta);
    out.outgoing.cumulative_losses = hedge_.cumulative_loss;
    if (variant == HedgeVariant::message_passing) {
      const Vector own = hedge_.log_weight();
      for (NodeId l : neighbors_)
        out.outgoing.log_messages.emplace_back(l, outgoing_log_message(own, l, neighbors_, incoming_));
    }
    return out;
  }

  /// Exchange half of a round: given the exchanges of exactly this node's
  /// neighbors, recompute the kernel weights and update the duals.
  void complete_round(std::span<const RoundExchange> exchanges, const AdmmConfig& cfg,
                      HedgeVariant variant = HedgeVariant::product) {
    if (exchanges.size() != neighbors_.size())
      throw ProtocolError("node " + std::to_string(id_) + ": expected " +
                          std::to_string(neighbors_.size()) + " exchanges, got " +
                          std::to_string(exchanges.size()));
    std::vector<const RoundExchange*> ordered(neighbors_.size(), nullptr);
    for (const auto& ex : exchanges) {
      auto it = std::lower_bound(neighbors_.begin(), neighbors_.end(), ex.sender);
      if (it == neighbors_.end() || *it != ex.sender)
        throw ProtocolError("node " + std::to_string(id_) + ": exchange from non-neighbor " +
                            std::to_string(ex.sender));
      auto& slot = ordered[static_cast<std::size_t>(it - neighbors_.begin())];
      if (slot) throw ProtocolError("duplicate exchange from " + std::to_string(ex.sender));
      if (ex.thetas.size() != maps_.size())
        throw ProtocolError("exchange from " + std::to_string(ex.sender) + " has wrong kernel count");
      slot = &ex;
    }

    if (variant == HedgeVariant::product) {
      std::vector<Vector> cum;
      for (const auto* ex : ordered) cum.push_back(ex->cumulative_losses);
      hedge_.weights = combine_weights(hedge_.cumulative_loss, cum, hedge_.eta_global);
    } else {
      hedge_.weights = mp_combine_weights(hedge_.log_weight(), incoming_);
      for (std::size_t i = 0; i < ordered.size(); ++i) {
        const Vector* m = ordered[i]->message_for(id_);
        if (!m) throw ProtocolError("missing message from " + std::to_string(ordered[i]->sender));
        incoming_[i] = *m;
      }
    }

    std::vector<Vector> nbr(neighbors_.size());
    for (std::size_t p = 0; p < maps_.size(); ++p) {
      for (std::size_t i = 0; i < ordered.size(); ++i) nbr[i] = ordered[i]->thetas[p];
      kernels_[p].lambda = lambda_update(kernels_[p], kernels_[p].theta, nbr, cfg);
    }
    for (std::size_t i = 0; i < ordered.size(); ++i) neighbor_thetas_[i] = ordered[i]->thetas;
  }

 private:
  NodeId id_;
  std::vector<NodeId> neighbors_;  // sorted
  FeatureMaps maps_;
  std::vector<KernelLearnerState> kernels_;
  HedgeState hedge_;
  std::vector<std::vector<Vector>> neighbor_thetas_;  // [neighbor][kernel], last received
  std::vector<Vector> incoming_;                      // [neighbor] log messages m_{l->k}
};

inline double predict_combined(const LearnerNode& node, const Vector& x) {
  return node.predict_combined(x);
}

/// Builds one learner per node with shared maps. Message passing on a graph
/// with cycles is rejected unless `allow_cycles` is set.
inline std::vector<LearnerNode> make_learners(const Graph& g, const FeatureMaps& maps,
                                              double eta_global, HedgeVariant variant,
                                              bool allow_cycles = false) {
  if (variant == HedgeVariant::message_passing && !is_forest(g)) {
    if (!allow_cycles) throw ApplicabilityError("message passing requires an acyclic graph");
    std::cerr << "warning: message passing on a graph with cycles counts some losses more than once\n";
  }
  std::vector<LearnerNode> nodes;
  nodes.reserve(g.num_nodes());
  for (NodeId k = 0; k < g.num_nodes(); ++k) nodes.emplace_back(k, g.neighbors(k), maps, eta_global);
  return nodes;
}

}  // namespace domkl
