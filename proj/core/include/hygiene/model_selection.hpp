#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hygiene/matrix.hpp"
#include "hygiene/metrics.hpp"
#include "hygiene/model.hpp"

namespace hygiene {

struct SplitPlan {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
  std::uint64_t seed = 0;
  double ratio = 0.8;

  std::string to_json() const;
};

/// Per class (ascending code): shuffle that class's rows, put the first
/// floor(ratio * n) into train and the rest into test.
SplitPlan stratified_split(std::span<const int> labels, double ratio = 0.8, std::uint64_t seed = 0);

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;  // each ascending
  std::uint64_t seed = 0;

  std::size_t k() const noexcept { return folds.size(); }
  /// Every row outside fold `f`, ascending.
  std::vector<std::size_t> training_rows(std::size_t f) const;
  std::string to_json() const;
};

/// Shuffles each class and deals its rows round-robin over the folds; the
/// dealing position carries over from one class to the next so fold sizes
/// differ by at most one.
FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k = 5, std::uint64_t seed = 0);

/// Trains on (train_x, train_y) and returns predictions for test_x.
using FitPredict =
    std::function<std::vector<int>(const Matrix& train_x, std::span<const int> train_y, const Matrix& test_x)>;

/// FitPredict backed by train_classifier.
FitPredict make_fit_predict(const ModelSpec& spec, std::uint64_t seed);

/// Mean misclassification rate over the folds of `plan`.
double cv_error(const Matrix& x, std::span<const int> y, const FoldPlan& plan, const FitPredict& fit);

struct FeatureSubset {
  std::array<int, 3> features{};  // 1-based, ascending
  double cv_loss = 1.0;
  std::size_t evaluated = 0;      // subsets scored during the search
};

/// Scores all 3-of-d column triples in lexicographic order and keeps the
/// first one with the lowest CV error.
FeatureSubset select_best_features(const Matrix& x, std::span<const int> y, const FitPredict& fit,
                                   const FoldPlan& plan);

struct TuningStep {
  std::size_t iteration = 0;  // 1-based
  double c = 0.0;
  double gamma = 0.0;
  double loss = 0.0;
  double best_so_far = 0.0;
};

struct TuningResult {
  double c = 1.0;
  double gamma = 1.0;
  double loss = 1.0;
  std::vector<TuningStep> trace;
};

inline constexpr double kTuneCMin = 1e-2;
inline constexpr double kTuneCMax = 1e3;
inline constexpr double kTuneGammaMin = 1e-3;
inline constexpr double kTuneGammaMax = 1e2;

/// Random search over (C, gamma), both log-uniform. Draw i uses the
/// generator seeded with derive_seed(seed, {i}), C first then gamma.
TuningResult tune_hyperparameters(const Matrix& x, std::span<const int> y, std::size_t budget, std::uint64_t seed,
                                  const FoldPlan& plan, const SvmParams& base = {});

struct CvOptions {
  bool select_features = false;
  std::size_t inner_k = 5;
  /// Random search for the SVM's C and gamma; ignored by other families.
  bool tune = false;
  std::size_t budget = 30;
};

struct PipelineFit {
  FittedPipeline pipeline;
  std::optional<FeatureSubset> selection;
  std::optional<TuningResult> tuning;
};

/// Optional feature selection and tuning (both scored by inner CV on the
/// given rows), then a final fit on all given rows.
PipelineFit fit_pipeline(const ModelSpec& spec, const Matrix& x, std::span<const int> y, const CvOptions& options,
                         std::uint64_t seed);

/// One report per fold; each fold's pipeline sees only its training rows.
std::vector<EvaluationReport> cross_validate(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                                             const FoldPlan& plan, const CvOptions& options = {},
                                             std::uint64_t seed = 0);

}  // namespace hygiene
