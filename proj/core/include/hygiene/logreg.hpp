#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hygiene/features.hpp"
#include "hygiene/matrix.hpp"

namespace hygiene {

struct LogRegParams {
  double l2 = 1e-4;
  std::size_t max_iter = 1000;
  double gradient_tolerance = 1e-6;
  bool standardize = true;

  friend bool operator==(const LogRegParams&, const LogRegParams&) = default;
};

/// Binary logistic regression; weights are d coefficients followed by the
/// intercept.
struct LogRegModel {
  std::vector<double> weights;
  std::optional<ScalerParams> scaler;
  std::size_t iterations = 0;

  std::size_t input_dim() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
  double probability(std::span<const double> x) const;

  friend bool operator==(const LogRegModel&, const LogRegModel&) = default;
};

/// Mean log-loss plus (l2 / 2) * |w|^2 (intercept unpenalized).
double logreg_loss(std::span<const double> weights, const Matrix& x, std::span<const int> y, double l2);
std::vector<double> logreg_gradient(std::span<const double> weights, const Matrix& x, std::span<const int> y,
                                    double l2);

/// Damped Newton iterations on the regularized loss until the gradient norm
/// is at most params.gradient_tolerance. Labels are 0/1.
LogRegModel train_logreg(const Matrix& x, std::span<const int> y, const LogRegParams& params = {});

}  // namespace hygiene
