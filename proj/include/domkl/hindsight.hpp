#pragma once

#include <cstddef>
#include <span>

#include "domkl/errors.hpp"
#include "domkl/features.hpp"

namespace domkl {

/// Best fixed parameter in hindsight for one kernel: ridge-regularised least
/// squares over the pooled samples of every learner. The ridge (1e-8 by
/// default) only breaks ties when the pooled system is rank deficient.
class HindsightAccumulator {
 public:
  explicit HindsightAccumulator(std::size_t dim, double ridge = 1e-8)
      : gram_(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))),
        zy_(Vector::Zero(static_cast<Eigen::Index>(dim))), ridge_(ridge) {}

  void add(const Vector& z, double y) {
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(z);
    zy_ += y * z;
    yy_ += y * y;
    ++count_;
  }

  std::size_t count() const noexcept { return count_; }

  Vector solve() const {
    if (count_ == 0) throw ParameterError("hindsight: no samples");
    Matrix a = gram_.selfadjointView<Eigen::Lower>();
    a.diagonal().array() += ridge_;
    Eigen::LDLT<Matrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw NumericError("hindsight: factorisation failed");
    return ldlt.solve(zy_);
  }

  /// Cumulative squared loss of theta over the accumulated samples.
  double loss(const Vector& theta) const {
    const Vector g = gram_.selfadjointView<Eigen::Lower>() * theta;
    return yy_ - 2.0 * theta.dot(zy_) + theta.dot(g);
  }

 private:
  Matrix gram_;  // lower triangle is authoritative
  Vector zy_;
  double yy_ = 0.0;
  double ridge_;
  std::size_t count_ = 0;
};

struct HindsightSolution {
  Vector theta;
  double cumulative_loss = 0.0;
};

/// theta*_p = argmin sum (y - theta^T z)^2 + ridge |theta|^2 over pooled samples.
inline HindsightSolution hindsight_best(std::span<const Vector> z, std::span<const double> y,
                                        double ridge = 1e-8) {
  if (z.empty() || z.size() != y.size()) throw ParameterError("hindsight_best: need matching, non-empty samples");
  HindsightAccumulator acc(static_cast<std::size_t>(z.front().size()), ridge);
  for (std::size_t i = 0; i < z.size(); ++i) acc.add(z[i], y[i]);
  HindsightSolution s;
  s.theta = acc.solve();
  s.cumulative_loss = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = y[i] - s.theta.dot(z[i]);
    s.cumulative_loss += r * r;
  }
  return s;
}

}  // namespace domkl
