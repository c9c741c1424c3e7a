#include "hygiene/trial.hpp"

#include <map>
#include <set>
#include <sstream>

#include "hygiene/error.hpp"
#include "hygiene/rng.hpp"
#include "hygiene/signal.hpp"

namespace hygiene {

namespace {

std::string features_cell(const std::vector<int>& features) {
  std::string s = "[";
  for (std::size_t i = 0; i < features.size(); ++i) s += (i ? " " : "") + std::to_string(features[i]);
  return s + "]";
}

std::string input_cell(const std::vector<std::pair<int, std::size_t>>& counts) {
  std::string s;
  for (const auto& [code, n] : counts) {
    if (!s.empty()) s += ' ';
    s += std::string(class_abbrev(class_from_code(code))) + ":" + std::to_string(n);
  }
  return s;
}

}  // namespace

TrialReport ten_run_trial(const Matrix& x, std::span<const int> labels, const ModelSpec& spec,
                          std::uint64_t base_seed, const TrialOptions& options) {
  if (x.rows() != labels.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() != 2) {
    throw Error(ErrorCode::InsufficientClasses,
                "trial needs exactly two classes, got " + std::to_string(classes.size()));
  }
  if (options.attempts == 0) throw Error(ErrorCode::InvalidArgument, "trial needs at least one attempt");

  TrialReport report;
  report.seed = base_seed;
  report.pooled = ConfusionMatrix(kNumClasses);
  double sum = 0.0;
  for (std::size_t a = 1; a <= options.attempts; ++a) {
    const auto attempt_seed = derive_seed(base_seed, {a});
    const auto split = stratified_split(labels, options.ratio, attempt_seed);

    // selection and tuning rows: the training split, or everything under cv_all
    std::vector<std::size_t> cv_rows = split.train;
    if (options.cv_all) {
      cv_rows.resize(labels.size());
      for (std::size_t i = 0; i < cv_rows.size(); ++i) cv_rows[i] = i;
    }
    CvOptions cv;
    cv.select_features = options.select_features;
    cv.tune = options.tune;
    cv.budget = options.budget;
    cv.inner_k = options.k;
    const auto cv_y = select<int>(labels, cv_rows);
    const auto fit = fit_pipeline(spec, x.select_rows(cv_rows), cv_y, cv, derive_seed(attempt_seed, {1}));

    ModelSpec final_spec = spec;
    if (fit.tuning) {
      final_spec.svm.c = fit.tuning->c;
      final_spec.svm.gamma = fit.tuning->gamma;
    }
    FittedPipeline pipeline = fit.pipeline;
    if (options.cv_all) {
      // the final model only ever sees the training split
      const auto train_x = pipeline.project(x.select_rows(split.train));
      pipeline.classifier = train_classifier(final_spec, train_x, select<int>(labels, split.train),
                                             derive_seed(attempt_seed, {2}));
    }

    const auto truth = select<int>(labels, split.test);
    const auto pred = pipeline.predict(x.select_rows(split.test));
    const auto cm = confusion(truth, pred, kNumClasses);

    TrialAttempt row;
    row.attempt = a;
    row.features = pipeline.features;
    row.test_size = split.test.size();
    row.misclassified = cm.total() - cm.trace();
    row.accuracy = 1.0 - static_cast<double>(row.misclassified) / static_cast<double>(row.test_size);
    std::map<int, std::size_t> counts;
    for (const int t : truth) ++counts[t];
    row.test_counts.assign(counts.begin(), counts.end());
    row.c = final_spec.svm.c;
    row.gamma = final_spec.svm.gamma;
    if (fit.tuning) row.trace = fit.tuning->trace;
    row.confusion = cm;
    for (std::size_t t = 0; t < kNumClasses; ++t) {
      for (std::size_t p = 0; p < kNumClasses; ++p) {
        report.pooled.add(static_cast<int>(t), static_cast<int>(p), cm.at(t, p));
      }
    }
    sum += row.accuracy;
    report.attempts.push_back(std::move(row));
  }
  report.overall_accuracy = sum / static_cast<double>(options.attempts);
  return report;
}

std::string trial_csv(const TrialReport& report) {
  std::ostringstream out;
  out << "Attempt,Features,Accuracy,Input,Misclassification\n";
  for (const auto& a : report.attempts) {
    out << a.attempt << ',' << features_cell(a.features) << ',' << format_percent(a.accuracy) << ','
        << input_cell(a.test_counts) << ',' << a.misclassified << '\n';
  }
  return out.str();
}

std::string trial_text(const TrialReport& report) {
  std::ostringstream out;
  out << "Attempt  Features    Accuracy  Input        Misclassification\n";
  for (const auto& a : report.attempts) {
    auto cell = [&](std::string s, std::size_t w) {
      s.resize(std::max(s.size(), w), ' ');
      return s;
    };
    out << cell(std::to_string(a.attempt), 9) << cell(features_cell(a.features), 12)
        << cell(format_percent(a.accuracy), 10) << cell(input_cell(a.test_counts), 13) << a.misclassified << '\n';
  }
  out << "Overall accuracy: " << format_percent(report.overall_accuracy) << '\n';
  out << "Pooled confusion (rows true, columns predicted):\n" << confusion_text(report.pooled);
  return out.str();
}

}  // namespace hygiene
