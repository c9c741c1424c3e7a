#include "hygiene/gnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hygiene/error.hpp"

namespace hygiene {

GnbModel train_gnb(const Matrix& x, std::span<const int> y, std::size_t num_classes, const GnbParams& params) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyData, "naive Bayes needs data");
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "naive Bayes: rows and labels differ in length");
  const std::size_t d = x.cols();

  std::vector<std::size_t> counts(num_classes, 0);
  for (const int v : y) {
    if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
      throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(v) + " outside [0, num_classes)");
    }
    counts[static_cast<std::size_t>(v)]++;
  }
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw Error(ErrorCode::InsufficientClasses, "naive Bayes needs at least two classes");
  }

  GnbModel model;
  model.prior.resize(num_classes);
  model.mean = Matrix(num_classes, d);
  model.variance = Matrix(num_classes, d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    for (std::size_t f = 0; f < d; ++f) model.mean(c, f) += x(r, f);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    model.prior[c] = static_cast<double>(counts[c]) / static_cast<double>(x.rows());
    for (std::size_t f = 0; f < d && counts[c] > 0; ++f) model.mean(c, f) /= static_cast<double>(counts[c]);
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    for (std::size_t f = 0; f < d; ++f) {
      const double dev = x(r, f) - model.mean(c, f);
      model.variance(c, f) += dev * dev;
    }
  }

  // floor relative to the widest feature over all rows
  double max_var = 0.0;
  for (std::size_t f = 0; f < d; ++f) {
    double mu = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mu += x(r, f);
    mu /= static_cast<double>(x.rows());
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, f) - mu) * (x(r, f) - mu);
    max_var = std::max(max_var, var / static_cast<double>(x.rows()));
  }
  model.variance_floor = max_var > 0.0 ? params.var_smoothing * max_var : params.var_smoothing;

  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t f = 0; f < d; ++f) {
      const double var = counts[c] > 0 ? model.variance(c, f) / static_cast<double>(counts[c]) : 0.0;
      model.variance(c, f) = var + model.variance_floor;
    }
  }
  return model;
}

std::vector<double> GnbModel::posterior(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "naive Bayes expects " + std::to_string(input_dim()) + " features, got " + std::to_string(x.size()));
  }
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_joint(num_classes(), neg_inf);
  for (std::size_t c = 0; c < num_classes(); ++c) {
    if (prior[c] <= 0.0) continue;
    double lj = std::log(prior[c]);
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double var = variance(c, f);
      const double dev = x[f] - mean(c, f);
      lj -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + dev * dev / var);
    }
    log_joint[c] = lj;
  }
  const double top = *std::max_element(log_joint.begin(), log_joint.end());
  double norm = 0.0;
  for (const double v : log_joint) norm += v == neg_inf ? 0.0 : std::exp(v - top);
  std::vector<double> post(num_classes());
  for (std::size_t c = 0; c < num_classes(); ++c) {
    post[c] = log_joint[c] == neg_inf ? 0.0 : std::exp(log_joint[c] - top) / norm;
  }
  return post;
}

int GnbModel::predict(std::span<const double> x) const {
  const auto post = posterior(x);
  return static_cast<int>(std::max_element(post.begin(), post.end()) - post.begin());
}

}  // namespace hygiene
