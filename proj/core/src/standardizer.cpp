#include <cmath>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/features.hpp"

namespace hygiene {

std::vector<double> ScalerParams::apply(std::span<const double> row) const {
  if (row.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "scaler expects " + std::to_string(dim()) + " values, got " + std::to_string(row.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / stddev[c];
  return out;
}

Matrix ScalerParams::apply(const Matrix& m) const {
  if (m.cols() != dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "scaler expects " + std::to_string(dim()) + " columns, got " + std::to_string(m.cols()));
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = (m(r, c) - mean[c]) / stddev[c];
  }
  return out;
}

Matrix ScalerParams::unapply(const Matrix& m) const {
  if (m.cols() != dim()) throw Error(ErrorCode::DimensionMismatch, "scaler column count differs");
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) * stddev[c] + mean[c];
  }
  return out;
}

ScalerParams fit_standardizer(const Matrix& m) {
  if (m.rows() < 2) throw Error(ErrorCode::TooFewRows, "standardizer needs at least 2 rows");
  const std::size_t d = m.cols();
  const double n = static_cast<double>(m.rows());
  ScalerParams p{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), std::vector<bool>(d, false)};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) p.mean[c] += m(r, c);
  }
  for (auto& v : p.mean) v /= n;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) p.stddev[c] += (m(r, c) - p.mean[c]) * (m(r, c) - p.mean[c]);
  }
  for (std::size_t c = 0; c < d; ++c) {
    p.stddev[c] = std::sqrt(p.stddev[c] / n);
    if (!(p.stddev[c] > 0.0)) {
      p.stddev[c] = 1.0;
      p.degenerate[c] = true;
    }
  }
  return p;
}

ScalerParams fit_standardizer(const FeatureMatrix& m) {
  m.validate();
  return fit_standardizer(m.to_matrix());
}

namespace {

FeatureMatrix rebuild(const FeatureMatrix& like, const Matrix& values) {
  FeatureMatrix out;
  out.labels = like.labels;
  out.rows.resize(values.rows());
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < kNumFeatures; ++c) out.rows[r].values[c] = values(r, c);
  }
  return out;
}

}  // namespace

FeatureMatrix apply_standardizer(const ScalerParams& params, const FeatureMatrix& m) {
  return rebuild(m, params.apply(m.to_matrix()));
}

FeatureMatrix unapply_standardizer(const ScalerParams& params, const FeatureMatrix& m) {
  return rebuild(m, params.unapply(m.to_matrix()));
}

}  // namespace hygiene
