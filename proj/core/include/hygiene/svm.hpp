#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hygiene/features.hpp"
#include "hygiene/matrix.hpp"

namespace hygiene {

struct SvmParams {
  double c = 1.0;
  /// Kernel exp(-gamma * |x - z|^2); gamma = 1 is the plain RBF kernel.
  double gamma = 1.0;
  /// Stop once the maximal KKT violating pair gap drops to this value.
  double tolerance = 1e-3;
  /// One pass = n working-pair updates.
  std::size_t max_passes = 100000;
  bool standardize = true;

  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

/// Binary soft-margin RBF SVM. Positive class is label 1.
struct SvmModel {
  Matrix support_vectors;          // in (scaled) input space
  std::vector<double> dual_coef;   // alpha_i * y_i, y in {-1, +1}
  double bias = 0.0;
  double c = 1.0;
  double gamma = 1.0;
  std::optional<ScalerParams> scaler;
  std::size_t input_dim = 0;

  /// sum_i alpha_i y_i K(sv_i, x) + b on the raw (unscaled) input.
  double decision(std::span<const double> x) const;
};

struct SvmDiagnostics {
  std::vector<double> alpha;  // every training point, training order
  std::size_t iterations = 0;
  double kkt_gap = 0.0;
  double dual_objective = 0.0;  // sum(alpha) - 1/2 alpha' Q alpha (maximized)
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Sequential minimal optimization on the dual. Labels must be 0/1 with both
/// present. Throws InsufficientClasses, NoConvergence or InvalidArgument.
SvmModel train_svm(const Matrix& x, std::span<const int> y, const SvmParams& params = {},
                   SvmDiagnostics* diagnostics = nullptr);

}  // namespace hygiene
