#include "hygiene/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hygiene/error.hpp"

namespace hygiene {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(std::span<const double> w, std::span<const double> x) {
  double z = w[x.size()];
  for (std::size_t f = 0; f < x.size(); ++f) z += w[f] * x[f];
  return z;
}

void check_shapes(std::span<const double> w, const Matrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "logistic regression: rows and labels differ");
  if (w.size() != x.cols() + 1) throw Error(ErrorCode::DimensionMismatch, "logistic regression: weight size");
}

// In-place Cholesky solve of a (dense, n x n) * out = b; false if a is not
// numerically positive definite.
bool cholesky_solve(std::vector<double> a, std::size_t n, std::span<const double> b, std::vector<double>& out) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0)) return false;
    const double l = std::sqrt(diag);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / l;
    }
  }
  out.assign(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) out[i] -= a[i * n + k] * out[k];
    out[i] /= a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) out[i] -= a[k * n + i] * out[k];
    out[i] /= a[i * n + i];
  }
  return true;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double logreg_loss(std::span<const double> w, const Matrix& x, std::span<const int> y, double l2) {
  check_shapes(w, x, y);
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double z = linear(w, x.row(r));
    loss += softplus(z) - (y[r] == 1 ? z : 0.0);
  }
  loss /= static_cast<double>(x.rows());
  double reg = 0.0;
  for (std::size_t f = 0; f < x.cols(); ++f) reg += w[f] * w[f];
  return loss + 0.5 * l2 * reg;
}

std::vector<double> logreg_gradient(std::span<const double> w, const Matrix& x, std::span<const int> y, double l2) {
  check_shapes(w, x, y);
  const std::size_t d = x.cols();
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    const double err = sigmoid(linear(w, row)) - (y[r] == 1 ? 1.0 : 0.0);
    for (std::size_t f = 0; f < d; ++f) g[f] += err * row[f];
    g[d] += err;
  }
  for (auto& v : g) v /= static_cast<double>(x.rows());
  for (std::size_t f = 0; f < d; ++f) g[f] += l2 * w[f];
  return g;
}

double LogRegModel::probability(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "logistic regression expects " + std::to_string(input_dim()) +
                                                  " features, got " + std::to_string(x.size()));
  }
  if (scaler) return sigmoid(linear(weights, scaler->apply(x)));
  return sigmoid(linear(weights, x));
}

LogRegModel train_logreg(const Matrix& x_raw, std::span<const int> y, const LogRegParams& params) {
  if (x_raw.rows() == 0) throw Error(ErrorCode::EmptyData, "logistic regression needs data");
  if (x_raw.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "logistic regression: rows and labels differ");
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
  if (!has_pos || !has_neg) throw Error(ErrorCode::InsufficientClasses, "logistic regression needs both classes");

  LogRegModel model;
  Matrix x = x_raw;
  if (params.standardize && x.rows() >= 2) {
    model.scaler = fit_standardizer(x_raw);
    x = model.scaler->apply(x_raw);
  }
  const std::size_t d = x.cols();
  const std::size_t p = d + 1;
  std::vector<double> w(p, 0.0);
  const double n = static_cast<double>(x.rows());

  for (std::size_t iter = 0;; ++iter) {
    const auto g = logreg_gradient(w, x, y, params.l2);
    if (norm2(g) <= params.gradient_tolerance) {
      model.weights = std::move(w);
      model.iterations = iter;
      return model;
    }
    if (iter >= params.max_iter) {
      throw Error(ErrorCode::NoConvergence, "logistic regression gradient norm " + std::to_string(norm2(g)) +
                                                " after " + std::to_string(iter) + " iterations");
    }

    std::vector<double> hess(p * p, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = x.row(r);
      const double s = sigmoid(linear(w, row));
      const double wt = s * (1.0 - s) / n;
      for (std::size_t i = 0; i < p; ++i) {
        const double xi = i < d ? row[i] : 1.0;
        for (std::size_t j = 0; j <= i; ++j) hess[i * p + j] += wt * xi * (j < d ? row[j] : 1.0);
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < i; ++j) hess[j * p + i] = hess[i * p + j];
      if (i < d) hess[i * p + i] += params.l2;
    }

    std::vector<double> neg_g(g.size());
    std::transform(g.begin(), g.end(), neg_g.begin(), [](double v) { return -v; });
    std::vector<double> step;
    for (double damping = 0.0;; damping = std::max(1e-10, damping * 10.0)) {
      auto h = hess;
      for (std::size_t i = 0; i < p; ++i) h[i * p + i] += damping;
      if (cholesky_solve(std::move(h), p, neg_g, step)) break;
    }

    // Armijo backtracking
    const double f0 = logreg_loss(w, x, y, params.l2);
    double slope = 0.0;
    for (std::size_t i = 0; i < p; ++i) slope += g[i] * step[i];
    double t = 1.0;
    std::vector<double> trial(p);
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      for (std::size_t i = 0; i < p; ++i) trial[i] = w[i] + t * step[i];
      if (logreg_loss(trial, x, y, params.l2) <= f0 + 1e-4 * t * slope) break;
    }
    w = trial;
  }
}

}  // namespace hygiene
