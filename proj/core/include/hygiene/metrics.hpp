#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hygiene/signal.hpp"

namespace hygiene {

/// Counts indexed [true][predicted] over class codes 0..k-1.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes = kNumClasses);

  std::size_t num_classes() const noexcept { return k_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * k_ + predicted); }
  void add(int truth, int predicted, std::size_t count = 1);

  std::size_t total() const noexcept;
  std::size_t trace() const noexcept;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t col_sum(std::size_t predicted) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

/// Throws LengthMismatch, EmptyData, OutOfRange.
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          std::size_t num_classes = kNumClasses);

struct MacroMetrics {
  double accuracy = 0.0;
  double recall_macro = 0.0;
  double precision_macro = 0.0;
};

/// Averages run over the classes that occur as truth or prediction. A class
/// with an empty row has recall 0, one with an empty column precision 0.
/// Throws EmptyMatrix.
MacroMetrics macro_metrics(const ConfusionMatrix& cm);

struct EvaluationReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double recall_macro = 0.0;
  double precision_macro = 0.0;
  std::size_t misclassified = 0;
};

EvaluationReport evaluate(std::span<const int> y_true, std::span<const int> y_pred,
                          std::size_t num_classes = kNumClasses);
EvaluationReport evaluate(const ConfusionMatrix& cm);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct FoldSummary {
  MeanStd accuracy;
  MeanStd recall;
  MeanStd precision;
  std::size_t folds = 0;
};

/// Throws EmptyData.
MeanStd mean_std(std::span<const double> values);
FoldSummary aggregate_folds(std::span<const EvaluationReport> reports);

/// Mean rounded to 2 decimals in shortest form ("1.0", "0.96"), std to 2
/// fixed decimals: "1.0 ± 0.00".
std::string format_mean_std(const MeanStd& m);
/// 0.95 -> "95.00%".
std::string format_percent(double fraction);
/// Rounded to 2 decimals, trailing zeros dropped but one digit kept.
std::string format_score(double value);

/// Aligned text rendering with class abbreviations as headers.
std::string confusion_text(const ConfusionMatrix& cm);

}  // namespace hygiene
