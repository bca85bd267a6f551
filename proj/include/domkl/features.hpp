#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "domkl/errors.hpp"

namespace domkl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Gaussian kernel exp(-|x - x'|^2 / (2 sigma^2)); `bandwidth` is sigma^2.
struct KernelSpec {
  double bandwidth = 1.0;

  explicit KernelSpec(double sigma2 = 1.0) : bandwidth(sigma2) {
    if (!(sigma2 > 0.0)) throw ParameterError("kernel bandwidth must be positive");
  }
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct KernelDictionary {
  std::vector<KernelSpec> specs;
  std::uint64_t shared_seed = 0;

  std::size_t size() const noexcept { return specs.size(); }
};

/// The 17-kernel Gaussian dictionary, sigma_p^2 = 10^((p - 9) / 2), p = 1..17.
inline KernelDictionary default_dictionary(std::uint64_t shared_seed = 0) {
  KernelDictionary d;
  d.shared_seed = shared_seed;
  for (int p = 1; p <= 17; ++p) d.specs.emplace_back(std::pow(10.0, (p - 9) / 2.0));
  return d;
}

inline double gaussian_kernel(const KernelSpec& spec, const Vector& x, const Vector& x2) {
  if (x.size() != x2.size()) throw ParameterError("gaussian_kernel: dimension mismatch");
  return std::exp(-(x - x2).squaredNorm() / (2.0 * spec.bandwidth));
}

/// Random Fourier feature map for one Gaussian kernel. z(x) has 2M entries:
/// M sines followed by M cosines of v_i^T x, scaled by 1/sqrt(M).
class FeatureMap {
 public:
  FeatureMap(KernelSpec spec, std::size_t input_dim, std::size_t num_features,
             std::uint64_t seed, std::size_t kernel_index = 0)
      : spec_(spec), kernel_index_(kernel_index), seed_(seed) {
    if (input_dim < 1) throw ParameterError("feature map: input_dim must be >= 1");
    if (num_features < 1) throw ParameterError("feature map: num_features must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(spec.bandwidth));
    spectral_.resize(static_cast<Eigen::Index>(num_features), static_cast<Eigen::Index>(input_dim));
    // Row-major fill so a row is a complete draw of v_i.
    for (Eigen::Index i = 0; i < spectral_.rows(); ++i)
      for (Eigen::Index j = 0; j < spectral_.cols(); ++j) spectral_(i, j) = normal(rng);
  }

  std::size_t num_features() const noexcept { return static_cast<std::size_t>(spectral_.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(spectral_.cols()); }
  std::size_t output_dim() const noexcept { return 2 * num_features(); }
  std::size_t kernel_index() const noexcept { return kernel_index_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const KernelSpec& spec() const noexcept { return spec_; }
  const Matrix& spectral_samples() const noexcept { return spectral_; }

  Vector operator()(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != input_dim())
      throw ParameterError("feature map: input dimension mismatch");
    const Eigen::Index m = spectral_.rows();
    const Vector proj = spectral_ * x;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    Vector z(2 * m);
    z.head(m) = proj.array().sin() * scale;
    z.tail(m) = proj.array().cos() * scale;
    return z;
  }

 private:
  KernelSpec spec_;
  std::size_t kernel_index_;
  std::uint64_t seed_;
  Matrix spectral_;
};

inline FeatureMap build_feature_map(const KernelSpec& spec, std::size_t input_dim,
                                    std::size_t num_features, std::uint64_t seed) {
  return FeatureMap(spec, input_dim, num_features, seed);
}

inline Vector map(const FeatureMap& fm, const Vector& x) { return fm(x); }

using FeatureMaps = std::vector<std::shared_ptr<const FeatureMap>>;

/// One shared map per dictionary kernel; kernel p (0-based) uses shared_seed + p.
inline FeatureMaps build_dictionary_maps(const KernelDictionary& dict, std::size_t input_dim,
                                         std::size_t num_features) {
  if (dict.specs.empty()) throw ParameterError("kernel dictionary is empty");
  FeatureMaps maps;
  maps.reserve(dict.size());
  for (std::size_t p = 0; p < dict.size(); ++p)
    maps.push_back(std::make_shared<const FeatureMap>(dict.specs[p], input_dim, num_features,
                                                      dict.shared_seed + p, p));
  return maps;
}

}  // namespace domkl
