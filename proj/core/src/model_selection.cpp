#include "hygiene/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>

#include "hygiene/error.hpp"
#include "hygiene/features.hpp"
#include "hygiene/rng.hpp"

namespace hygiene {

namespace {

std::map<int, std::vector<std::size_t>> rows_by_class(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

}  // namespace

std::string SplitPlan::to_json() const {
  const nlohmann::json j{{"seed", seed}, {"ratio", ratio}, {"train", train}, {"test", test}};
  return j.dump();
}

SplitPlan stratified_split(std::span<const int> labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "split ratio must lie in (0, 1)");
  if (labels.empty()) throw Error(ErrorCode::EmptyData, "nothing to split");
  // smallest class size for which both sides get at least one row
  const auto min_n = static_cast<std::size_t>(std::ceil(1.0 / std::min(ratio, 1.0 - ratio) - 1e-9));

  SplitPlan plan;
  plan.seed = seed;
  plan.ratio = ratio;
  Rng rng(seed);
  for (auto& [label, rows] : rows_by_class(labels)) {
    if (rows.size() < min_n) {
      throw Error(ErrorCode::TooFewSamples, "class " + std::to_string(label) + " has " +
                                                std::to_string(rows.size()) + " rows, need " +
                                                std::to_string(min_n));
    }
    rng.shuffle(std::span<std::size_t>(rows));
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows.size()) + 1e-9));
    plan.train.insert(plan.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    plan.test.insert(plan.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());
  return plan;
}

std::vector<std::size_t> FoldPlan::training_rows(std::size_t f) const {
  std::vector<std::size_t> rows;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) rows.insert(rows.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::string FoldPlan::to_json() const {
  const nlohmann::json j{{"seed", seed}, {"k", folds.size()}, {"folds", folds}};
  return j.dump();
}

FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.resize(k);
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& [label, rows] : rows_by_class(labels)) {
    if (rows.size() < k) {
      throw Error(ErrorCode::TooFewSamples, "class " + std::to_string(label) + " has " +
                                                std::to_string(rows.size()) + " rows, fewer than k = " +
                                                std::to_string(k));
    }
    rng.shuffle(std::span<std::size_t>(rows));
    for (const auto r : rows) {
      plan.folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

FitPredict make_fit_predict(const ModelSpec& spec, std::uint64_t seed) {
  return [spec, seed](const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x) {
    return predict(train_classifier(spec, train_x, train_y, seed), test_x);
  };
}

double cv_error(const Matrix& x, std::span<const int> y, const FoldPlan& plan, const FitPredict& fit) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  if (plan.k() == 0) throw Error(ErrorCode::InvalidArgument, "empty fold plan");
  double total = 0.0;
  for (std::size_t f = 0; f < plan.k(); ++f) {
    const auto& test_rows = plan.folds[f];
    const auto train_rows = plan.training_rows(f);
    const auto pred = fit(x.select_rows(train_rows), select<int>(y, train_rows), x.select_rows(test_rows));
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test_rows.size(); ++i) wrong += pred.at(i) != y[test_rows[i]] ? 1 : 0;
    total += test_rows.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(test_rows.size());
  }
  return total / static_cast<double>(plan.k());
}

FeatureSubset select_best_features(const Matrix& x, std::span<const int> y, const FitPredict& fit,
                                   const FoldPlan& plan) {
  if (x.cols() < 3) throw Error(ErrorCode::DimensionMismatch, "feature selection needs at least 3 columns");
  FeatureSubset best;
  bool have = false;
  const std::size_t d = x.cols();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      for (std::size_t c = b + 1; c < d; ++c) {
        const std::array<std::size_t, 3> cols{a, b, c};
        const double loss = cv_error(x.select_cols(cols), y, plan, fit);
        ++best.evaluated;
        if (!have || loss < best.cv_loss - 1e-12) {
          have = true;
          best.cv_loss = loss;
          best.features = {static_cast<int>(a + 1), static_cast<int>(b + 1), static_cast<int>(c + 1)};
        }
      }
    }
  }
  return best;
}

TuningResult tune_hyperparameters(const Matrix& x, std::span<const int> y, std::size_t budget, std::uint64_t seed,
                                  const FoldPlan& plan, const SvmParams& base) {
  if (budget == 0) throw Error(ErrorCode::InvalidArgument, "tuning budget must be at least 1");
  TuningResult result;
  ModelSpec spec;
  spec.family = Family::Svm;
  spec.svm = base;
  for (std::size_t i = 0; i < budget; ++i) {
    Rng rng(derive_seed(seed, {i}));
    spec.svm.c = rng.log_uniform(kTuneCMin, kTuneCMax);
    spec.svm.gamma = rng.log_uniform(kTuneGammaMin, kTuneGammaMax);
    const double loss = cv_error(x, y, plan, make_fit_predict(spec, 0));
    if (i == 0 || loss < result.loss - 1e-12) {
      result.loss = loss;
      result.c = spec.svm.c;
      result.gamma = spec.svm.gamma;
    }
    result.trace.push_back({i + 1, spec.svm.c, spec.svm.gamma, loss, result.loss});
  }
  return result;
}

PipelineFit fit_pipeline(const ModelSpec& spec_in, const Matrix& x, std::span<const int> y, const CvOptions& options,
                         std::uint64_t seed) {
  ModelSpec spec = spec_in;
  PipelineFit fit;
  Matrix used = x;
  if (options.select_features) {
    const auto inner = stratified_kfold(y, options.inner_k, derive_seed(seed, {1}));
    fit.selection = select_best_features(x, y, make_fit_predict(spec, derive_seed(seed, {2})), inner);
    fit.pipeline.features.assign(fit.selection->features.begin(), fit.selection->features.end());
    used = x.select_cols(feature_columns(fit.pipeline.features));
  } else {
    fit.pipeline.features.resize(x.cols());
    std::iota(fit.pipeline.features.begin(), fit.pipeline.features.end(), 1);
  }
  if (options.tune && spec.family == Family::Svm) {
    const auto inner = stratified_kfold(y, options.inner_k, derive_seed(seed, {3}));
    fit.tuning = tune_hyperparameters(used, y, options.budget, derive_seed(seed, {4}), inner, spec.svm);
    spec.svm.c = fit.tuning->c;
    spec.svm.gamma = fit.tuning->gamma;
  }
  fit.pipeline.classifier = train_classifier(spec, used, y, derive_seed(seed, {5}));
  return fit;
}

std::vector<EvaluationReport> cross_validate(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                                             const FoldPlan& plan, const CvOptions& options, std::uint64_t seed) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  std::vector<EvaluationReport> reports;
  for (std::size_t f = 0; f < plan.k(); ++f) {
    const auto train_rows = plan.training_rows(f);
    const auto& test_rows = plan.folds[f];
    const auto train_y = select<int>(y, train_rows);
    const auto fitted = fit_pipeline(spec, x.select_rows(train_rows), train_y, options, derive_seed(seed, {f}));
    const Matrix test_x = x.select_rows(test_rows);
    const auto pred = fitted.pipeline.predict(test_x);
    reports.push_back(evaluate(select<int>(y, test_rows), pred));
  }
  return reports;
}

}  // namespace hygiene
