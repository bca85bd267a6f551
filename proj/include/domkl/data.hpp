#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domkl/errors.hpp"
#include "domkl/features.hpp"
#include "domkl/random.hpp"

namespace domkl {

struct Dataset {
  Matrix features;  // N x d
  Vector labels;    // N
  std::string name;

  std::size_t size() const noexcept { return static_cast<std::size_t>(labels.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  Vector x(std::size_t i) const { return features.row(static_cast<Eigen::Index>(i)).transpose(); }
  double y(std::size_t i) const { return labels[static_cast<Eigen::Index>(i)]; }
};

/// One sample of one learner's stream; `time` is 1-based.
struct StreamSample {
  std::size_t learner = 0;
  std::size_t time = 1;
  Vector x;
  double y = 0.0;
};

using Stream = std::vector<StreamSample>;

namespace detail {
inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}
inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}
}  // namespace detail

/// Comma-separated numeric file. `label_column` is a 0-based index; the
/// remaining columns become features in file order.
inline Dataset load_csv(const std::string& path, std::size_t label_column, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0, width = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    auto cells = detail::split_commas(line);
    if (width == 0) {
      width = cells.size();
      if (label_column >= width)
        throw ParseError(path + ": label column " + std::to_string(label_column) +
                             " out of range for " + std::to_string(width) + " columns",
                         line_no);
    } else if (cells.size() != width) {
      throw ParseError(path + ": expected " + std::to_string(width) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      auto cell = cells[c];
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), row[c]);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(row[c]))
        throw ParseError(path + ":" + std::to_string(line_no) + ":" + std::to_string(c + 1) +
                             ": non-numeric cell '" + std::string(cell) + "'",
                         line_no, c + 1);
    }
    rows.push_back(std::move(row));
  }
  Dataset ds;
  ds.name = path;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width ? width - 1 : 0);
  ds.features.resize(n, d);
  ds.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_column)
        ds.labels[i] = rows[static_cast<std::size_t>(i)][c];
      else
        ds.features(i, j++) = rows[static_cast<std::size_t>(i)][c];
    }
  }
  return ds;
}

/// Per-column affine map onto [0, 1]; constant columns map to 0.
struct MinMaxScaling {
  Vector feature_min, feature_range;
  double label_min = 0.0, label_range = 0.0;

  static double scale(double v, double lo, double range) { return range > 0.0 ? (v - lo) / range : 0.0; }

  Dataset apply(const Dataset& ds) const {
    Dataset out = ds;
    for (Eigen::Index j = 0; j < out.features.cols(); ++j)
      for (Eigen::Index i = 0; i < out.features.rows(); ++i)
        out.features(i, j) = scale(ds.features(i, j), feature_min[j], feature_range[j]);
    for (Eigen::Index i = 0; i < out.labels.size(); ++i)
      out.labels[i] = scale(ds.labels[i], label_min, label_range);
    return out;
  }

  double denormalize_label(double v) const { return label_min + v * label_range; }
};

inline MinMaxScaling fit_minmax(const Dataset& ds) {
  if (ds.size() < 2) throw ParameterError("normalize_minmax: need at least two rows");
  MinMaxScaling s;
  s.feature_min = ds.features.colwise().minCoeff().transpose();
  s.feature_range = ds.features.colwise().maxCoeff().transpose() - s.feature_min;
  s.label_min = ds.labels.minCoeff();
  s.label_range = ds.labels.maxCoeff() - s.label_min;
  return s;
}

inline Dataset normalize_minmax(const Dataset& ds) { return fit_minmax(ds).apply(ds); }

/// Contiguous blocks of T = floor(N / K) samples; the remainder is dropped.
inline std::vector<Stream> partition_regression(const Dataset& ds, std::size_t k_count) {
  if (k_count == 0 || k_count > ds.size())
    throw ParameterError("partition: need 1 <= K <= N");
  const std::size_t t_len = ds.size() / k_count;
  std::vector<Stream> streams(k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t t = 0; t < t_len; ++t) {
      const std::size_t i = k * t_len + t;
      streams[k].push_back({k, t + 1, ds.x(i), ds.y(i)});
    }
  return streams;
}

/// Round-robin split that keeps temporal order inside every stream:
/// learner k (0-based) receives global indices k, K + k, 2K + k, ...
/// (the 1-based rule x_{k,t} = x_{K(t-1)+k}).
inline std::vector<Stream> partition_timeseries_interleaved(const Dataset& ds, std::size_t k_count) {
  if (k_count == 0 || k_count > ds.size())
    throw ParameterError("partition: need 1 <= K <= N");
  const std::size_t t_len = ds.size() / k_count;
  std::vector<Stream> streams(k_count);
  for (std::size_t t = 0; t < t_len; ++t)
    for (std::size_t k = 0; k < k_count; ++k) {
      const std::size_t i = k_count * t + k;
      streams[k].push_back({k, t + 1, ds.x(i), ds.y(i)});
    }
  return streams;
}

/// Lag embedding: row t has x = [y_{t-1}, ..., y_{t-s}] and label y_t.
inline Dataset ar_embed(std::span<const double> series, std::size_t order) {
  if (order < 1) throw ParameterError("ar_embed: order must be >= 1");
  if (series.size() <= order) throw ParameterError("ar_embed: series shorter than order + 1");
  const std::size_t n = series.size() - order;
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(order));
  ds.labels.resize(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = r + order;
    for (std::size_t lag = 1; lag <= order; ++lag)
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(lag - 1)) = series[t - lag];
    ds.labels[static_cast<Eigen::Index>(r)] = series[t];
  }
  return ds;
}

inline std::vector<double> to_series(const Vector& v) { return {v.data(), v.data() + v.size()}; }

struct ARSpec {
  std::size_t order = 1;
  double intercept = 0.0;
  Vector coefficients;
  double noise_std = 0.0;
};

/// Sum of |gamma_i| below 1 guarantees a bounded recursion.
inline bool ar_is_stable_hint(const ARSpec& spec) { return spec.coefficients.cwiseAbs().sum() < 1.0; }

/// y_t = c + sum_i gamma_i y_{t-i} + n_t from a zero history.
inline std::vector<double> synth_ar(const ARSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.order < 1 || static_cast<std::size_t>(spec.coefficients.size()) != spec.order)
    throw ParameterError("synth_ar: coefficient count must equal the order");
  if (!ar_is_stable_hint(spec))
    std::cerr << "warning: AR coefficients have sum |gamma_i| >= 1, the series may diverge\n";
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double v = spec.intercept + spec.noise_std * noise(rng);
    for (std::size_t i = 1; i <= spec.order && i <= t; ++i)
      v += spec.coefficients[static_cast<Eigen::Index>(i - 1)] * y[t - i];
    y[t] = v;
  }
  return y;
}

/// Random-feature regression target y = theta*^T z(x) + noise with x ~ U[0,1]^d.
struct SyntheticRegressionSpec {
  double generating_bandwidth = 1.0;
  std::size_t input_dim = 1;
  std::size_t num_features = 50;  // of the generating map
  Vector true_theta;              // 2 * num_features
  double noise_std = 0.0;
  std::uint64_t seed = 0;         // generating map seed

  FeatureMap generator() const {
    return FeatureMap(KernelSpec(generating_bandwidth), input_dim, num_features, seed);
  }
};

/// Spec with theta* drawn i.i.d. N(0, 1), giving labels of roughly unit variance.
inline SyntheticRegressionSpec make_synthetic_spec(double bandwidth, std::size_t input_dim,
                                                   std::size_t num_features, double noise_std,
                                                   std::uint64_t seed) {
  SyntheticRegressionSpec s;
  s.generating_bandwidth = bandwidth;
  s.input_dim = input_dim;
  s.num_features = num_features;
  s.noise_std = noise_std;
  s.seed = seed;
  std::mt19937_64 rng(mix_seed(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  s.true_theta.resize(static_cast<Eigen::Index>(2 * num_features));
  for (Eigen::Index i = 0; i < s.true_theta.size(); ++i) s.true_theta[i] = normal(rng);
  return s;
}

inline Dataset synth_regression(const SyntheticRegressionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (static_cast<std::size_t>(spec.true_theta.size()) != 2 * spec.num_features)
    throw ParameterError("synth_regression: theta* must have 2M entries");
  const FeatureMap gen = spec.generator();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  ds.name = "synthetic";
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.input_dim));
  ds.labels.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) ds.features(i, j) = unif(rng);
    ds.labels[i] = spec.true_theta.dot(gen(ds.features.row(i).transpose())) +
                   spec.noise_std * normal(rng);
  }
  return ds;
}

}  // namespace domkl
