#include "hygiene/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hygiene/error.hpp"
#include "hygiene/text.hpp"

namespace hygiene {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes) : k_(num_classes), counts_(num_classes * num_classes, 0) {
  if (num_classes == 0) throw Error(ErrorCode::InvalidArgument, "confusion matrix needs at least one class");
}

void ConfusionMatrix::add(int truth, int predicted, std::size_t count) {
  const auto k = static_cast<int>(k_);
  if (truth < 0 || truth >= k || predicted < 0 || predicted >= k) {
    throw Error(ErrorCode::OutOfRange, "class code outside 0.." + std::to_string(k - 1));
  }
  counts_[static_cast<std::size_t>(truth) * k_ + static_cast<std::size_t>(predicted)] += count;
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (const auto c : counts_) t += c;
  return t;
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += counts_[i * k_ + i];
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) s += at(truth, p);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < k_; ++t) s += at(t, predicted);
  return s;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t num_classes) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(y_true.size()) + " true labels but " +
                                               std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) throw Error(ErrorCode::EmptyData, "no predictions to score");
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) cm.add(y_true[i], y_pred[i]);
  return cm;
}

MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  MacroMetrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  std::size_t classes = 0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const auto row = cm.row_sum(c);
    const auto col = cm.col_sum(c);
    if (row == 0 && col == 0) continue;
    ++classes;
    const auto tp = static_cast<double>(cm.at(c, c));
    if (row > 0) m.recall_macro += tp / static_cast<double>(row);
    if (col > 0) m.precision_macro += tp / static_cast<double>(col);
  }
  m.recall_macro /= static_cast<double>(classes);
  m.precision_macro /= static_cast<double>(classes);
  return m;
}

EvaluationReport evaluate(const ConfusionMatrix& cm) {
  const auto m = macro_metrics(cm);
  return {cm, m.accuracy, m.recall_macro, m.precision_macro, cm.total() - cm.trace()};
}

EvaluationReport evaluate(std::span<const int> y_true, std::span<const int> y_pred, std::size_t num_classes) {
  return evaluate(confusion(y_true, y_pred, num_classes));
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyData, "nothing to aggregate");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

FoldSummary aggregate_folds(std::span<const EvaluationReport> reports) {
  std::vector<double> acc, rec, prec;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    rec.push_back(r.recall_macro);
    prec.push_back(r.precision_macro);
  }
  return {mean_std(acc), mean_std(rec), mean_std(prec), reports.size()};
}

std::string format_score(double value) {
  auto s = text::format_fixed(value, 2);
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string format_mean_std(const MeanStd& m) { return format_score(m.mean) + " ± " + text::format_fixed(m.std, 2); }

std::string format_percent(double fraction) { return text::format_fixed(fraction * 100.0, 2) + "%"; }

std::string confusion_text(const ConfusionMatrix& cm) {
  const auto k = cm.num_classes();
  auto label = [&](std::size_t c) {
    return c < kNumClasses ? std::string(class_abbrev(class_from_code(static_cast<int>(c)))) : std::to_string(c);
  };
  std::size_t width = 4;
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t p = 0; p < k; ++p) width = std::max(width, std::to_string(cm.at(t, p)).size() + 1);
  }
  std::ostringstream out;
  auto pad = [&](const std::string& s) { out << std::string(width > s.size() ? width - s.size() : 0, ' ') << s; };
  pad("t\\p");
  for (std::size_t p = 0; p < k; ++p) pad(label(p));
  out << '\n';
  for (std::size_t t = 0; t < k; ++t) {
    pad(label(t));
    for (std::size_t p = 0; p < k; ++p) pad(std::to_string(cm.at(t, p)));
    out << '\n';
  }
  return out.str();
}

}  // namespace hygiene
