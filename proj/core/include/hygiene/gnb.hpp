#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hygiene/matrix.hpp"

namespace hygiene {

struct GnbParams {
  /// Variance floor as a fraction of the largest per-feature variance.
  double var_smoothing = 1e-9;

  friend bool operator==(const GnbParams&, const GnbParams&) = default;
};

struct GnbModel {
  std::vector<double> prior;  // per class; zero for classes absent in training
  Matrix mean;                // classes x features
  Matrix variance;            // classes x features, each >= variance_floor
  double variance_floor = 0.0;

  std::size_t num_classes() const noexcept { return prior.size(); }
  std::size_t input_dim() const noexcept { return mean.cols(); }
  std::vector<double> posterior(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

  friend bool operator==(const GnbModel&, const GnbModel&) = default;
};

GnbModel train_gnb(const Matrix& x, std::span<const int> y, std::size_t num_classes, const GnbParams& params = {});

}  // namespace hygiene
