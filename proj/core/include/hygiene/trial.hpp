#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hygiene/matrix.hpp"
#include "hygiene/metrics.hpp"
#include "hygiene/model.hpp"
#include "hygiene/model_selection.hpp"

namespace hygiene {

struct TrialOptions {
  std::size_t attempts = 10;
  double ratio = 0.8;
  std::size_t k = 5;
  bool select_features = true;
  bool tune = true;
  std::size_t budget = 30;
  /// Run selection and tuning CV over every row instead of the training split.
  bool cv_all = false;
};

struct TrialAttempt {
  std::size_t attempt = 0;  // 1-based
  std::vector<int> features;
  double accuracy = 0.0;
  std::vector<std::pair<int, std::size_t>> test_counts;  // (class code, rows) ascending
  std::size_t misclassified = 0;
  std::size_t test_size = 0;
  double c = 0.0;
  double gamma = 0.0;
  std::vector<TuningStep> trace;
  ConfusionMatrix confusion;
};

struct TrialReport {
  std::vector<TrialAttempt> attempts;
  double overall_accuracy = 0.0;
  ConfusionMatrix pooled;  // summed over attempts
  std::uint64_t seed = 0;
};

/// Repeated split / select / tune / evaluate on a two-class dataset. Attempt
/// a (1-based) draws its split from derive_seed(base_seed, {a}).
TrialReport ten_run_trial(const Matrix& x, std::span<const int> labels, const ModelSpec& spec,
                          std::uint64_t base_seed, const TrialOptions& options = {});

/// Attempt,Features,Accuracy,Input,Misclassification
std::string trial_csv(const TrialReport& report);
std::string trial_text(const TrialReport& report);

}  // namespace hygiene
