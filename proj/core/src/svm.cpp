#include "hygiene/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hygiene/error.hpp"

namespace hygiene {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * d2);
}

double SvmModel::decision(std::span<const double> x) const {
  if (x.size() != input_dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "SVM expects " + std::to_string(input_dim) + " features, got " + std::to_string(x.size()));
  }
  std::vector<double> scaled;
  std::span<const double> z = x;
  if (scaler) {
    scaled = scaler->apply(x);
    z = scaled;
  }
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.rows(); ++i) f += dual_coef[i] * rbf_kernel(support_vectors.row(i), z, gamma);
  return f;
}

namespace {

constexpr double kTau = 1e-12;

class SmoSolver {
 public:
  SmoSolver(const Matrix& x, std::span<const int> y, double c, double gamma)
      : n_(x.rows()), c_(c), y_(n_), kernel_(n_ * n_), alpha_(n_, 0.0), grad_(n_, -1.0) {
    for (std::size_t i = 0; i < n_; ++i) y_[i] = y[i] == 1 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = rbf_kernel(x.row(i), x.row(j), gamma);
        kernel_[i * n_ + j] = k;
        kernel_[j * n_ + i] = k;
      }
    }
  }

  // Returns the final gap; throws NoConvergence when the budget runs out.
  double solve(double tolerance, std::size_t max_iterations) {
    for (iterations_ = 0;; ++iterations_) {
      std::size_t i = 0;
      std::size_t j = 0;
      const double gap = select_pair(i, j);
      if (gap <= tolerance) return gap;
      if (iterations_ >= max_iterations) {
        throw Error(ErrorCode::NoConvergence, "SMO did not reach KKT gap " + std::to_string(tolerance) + " in " +
                                                  std::to_string(max_iterations) + " updates (gap " +
                                                  std::to_string(gap) + ")");
      }
      update(i, j);
    }
  }

  double bias() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -ub;
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (at_upper(t)) {
        if (y_[t] < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y_[t] > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return -rho;
  }

  double dual_objective() const {
    // f(alpha) = 1/2 a'Qa - e'a and grad = Qa - e, so a'Qa = a'(grad + e)
    double obj = 0.0;
    for (std::size_t t = 0; t < n_; ++t) obj += alpha_[t] * (grad_[t] - 1.0);
    return -0.5 * obj;
  }

  const std::vector<double>& alpha() const { return alpha_; }
  std::size_t iterations() const { return iterations_; }

 private:
  bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
  bool in_up(std::size_t t) const { return y_[t] > 0 ? !at_upper(t) : !at_lower(t); }
  bool in_low(std::size_t t) const { return y_[t] > 0 ? !at_lower(t) : !at_upper(t); }
  double k(std::size_t a, std::size_t b) const { return kernel_[a * n_ + b]; }

  // Second-order working set selection (Fan, Chen & Lin 2005).
  double select_pair(std::size_t& out_i, std::size_t& out_j) const {
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    std::size_t i = n_;
    for (std::size_t t = 0; t < n_; ++t) {
      if (in_up(t) && -y_[t] * grad_[t] >= g_max) {
        g_max = -y_[t] * grad_[t];
        i = t;
      }
    }
    std::size_t j = n_;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n_; ++t) {
      if (!in_low(t)) continue;
      const double v = -y_[t] * grad_[t];
      g_min = std::min(g_min, v);
      if (i == n_) continue;
      const double b = g_max - v;
      if (b > 0.0) {
        double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (a <= 0.0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    out_i = i;
    out_j = j;
    if (i == n_ || j == n_) return 0.0;
    return g_max - g_min;
  }

  void update(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    const double q_ij = y_[i] * y_[j] * k(i, j);
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      double quad = k(i, i) + k(j, j) + 2.0 * q_ij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c_) { ai = c_; aj = c_ - diff; }
      } else {
        if (aj > c_) { aj = c_; ai = c_ + diff; }
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * q_ij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) { ai = c_; aj = sum - c_; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c_) {
        if (aj > c_) { aj = c_; ai = sum - c_; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < n_; ++t) {
      grad_[t] += y_[t] * (y_[i] * k(i, t) * di + y_[j] * k(j, t) * dj);
    }
  }

  std::size_t n_;
  double c_;
  std::vector<double> y_;
  std::vector<double> kernel_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::size_t iterations_ = 0;
};

}  // namespace

SvmModel train_svm(const Matrix& x, std::span<const int> y, const SvmParams& params, SvmDiagnostics* diagnostics) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "SVM: rows and labels differ in length");
  if (!(params.c > 0.0) || !(params.gamma > 0.0) || !std::isfinite(params.c) || !std::isfinite(params.gamma)) {
    throw Error(ErrorCode::InvalidArgument, "SVM needs C > 0 and gamma > 0");
  }
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
  if (!has_pos || !has_neg) throw Error(ErrorCode::InsufficientClasses, "SVM needs examples of both classes");
  if (std::any_of(y.begin(), y.end(), [](int v) { return v != 0 && v != 1; })) {
    throw Error(ErrorCode::InvalidArgument, "SVM labels must be 0 or 1");
  }

  SvmModel model;
  model.c = params.c;
  model.gamma = params.gamma;
  model.input_dim = x.cols();
  Matrix z = x;
  if (params.standardize && x.rows() >= 2) {
    model.scaler = fit_standardizer(x);
    z = model.scaler->apply(x);
  }

  SmoSolver solver(z, y, params.c, params.gamma);
  const double gap = solver.solve(params.tolerance, params.max_passes * std::max<std::size_t>(x.rows(), 1));
  model.bias = solver.bias();

  const auto& alpha = solver.alpha();
  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0.0) sv.push_back(i);
  }
  model.support_vectors = z.select_rows(sv);
  for (const auto i : sv) model.dual_coef.push_back(alpha[i] * (y[i] == 1 ? 1.0 : -1.0));

  if (diagnostics) {
    diagnostics->alpha = alpha;
    diagnostics->iterations = solver.iterations();
    diagnostics->kkt_gap = gap;
    diagnostics->dual_objective = solver.dual_objective();
  }
  return model;
}

}  // namespace hygiene
