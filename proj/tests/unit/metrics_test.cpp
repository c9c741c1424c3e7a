#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hygiene/error.hpp"
#include "hygiene/features.hpp"
#include "hygiene/metrics.hpp"
#include "hygiene/synthgen.hpp"
#include "hygiene/trial.hpp"
#include "oracles.hpp"

namespace hygiene {
namespace {

// truth/pred vectors for a pair with `a_to_b` errors one way and `b_to_a` the other
void pair_counts(int a, int b, std::size_t per_class, std::size_t a_to_b, std::size_t b_to_a, std::vector<int>& truth,
                 std::vector<int>& pred) {
  for (std::size_t i = 0; i < per_class; ++i) {
    truth.push_back(a);
    pred.push_back(i < a_to_b ? b : a);
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    truth.push_back(b);
    pred.push_back(i < b_to_a ? a : b);
  }
}

TEST(Confusion, PairedTrialTotals) {
  struct Case {
    int a, b;
    std::size_t ab, ba;
    const char* percent;
  };
  for (const Case c : {Case{0, 1, 6, 0, "95.00%"}, Case{1, 2, 4, 4, "93.33%"}, Case{0, 2, 1, 0, "99.17%"}}) {
    std::vector<int> t, p;
    pair_counts(c.a, c.b, 60, c.ab, c.ba, t, p);
    const auto r = evaluate(t, p);
    EXPECT_EQ(r.confusion.total(), 120u);
    EXPECT_EQ(r.misclassified, c.ab + c.ba);
    EXPECT_EQ(format_percent(r.accuracy), c.percent);
  }
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<int>{0, 1}, std::vector<int>{0}), Error);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), Error);
  EXPECT_THROW(confusion(std::vector<int>{0}, std::vector<int>{3}), Error);
  EXPECT_THROW(macro_metrics(ConfusionMatrix(3)), Error);
}

TEST(Confusion, MatchesRecountOracle) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.uniform_index(100);
    std::vector<int> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = static_cast<int>(rng.uniform_index(3));
      pred[i] = rng.uniform01() < 0.6 ? truth[i] : static_cast<int>(rng.uniform_index(3));
    }
    const auto cm = confusion(truth, pred);
    const auto o = testing::recount(truth, pred, 3);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) ASSERT_EQ(cm.at(a, b), o[a][b]);
    }
    EXPECT_EQ(cm.total(), n);

    // per-class recount of the macro averages over present classes
    double rec = 0, prec = 0, tr = 0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      std::size_t row = 0, col = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        row += o[c][k];
        col += o[k][c];
      }
      tr += static_cast<double>(o[c][c]);
      if (row == 0 && col == 0) continue;
      ++present;
      rec += row ? static_cast<double>(o[c][c]) / static_cast<double>(row) : 0.0;
      prec += col ? static_cast<double>(o[c][c]) / static_cast<double>(col) : 0.0;
    }
    const auto m = macro_metrics(cm);
    EXPECT_NEAR(m.accuracy, tr / static_cast<double>(n), 1e-12);
    EXPECT_NEAR(m.recall_macro, rec / static_cast<double>(present), 1e-12);
    EXPECT_NEAR(m.precision_macro, prec / static_cast<double>(present), 1e-12);
    for (const double v : {m.accuracy, m.recall_macro, m.precision_macro}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Macro, PerfectDiagonal) {
  const std::vector<int> y = {0, 1, 2, 2, 1, 0};
  const auto m = macro_metrics(confusion(y, y));
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.recall_macro, 1.0);
  EXPECT_EQ(m.precision_macro, 1.0);
}

TEST(Macro, TwoClassArithmetic) {
  ConfusionMatrix cm(2);
  cm.add(0, 0, 11);
  cm.add(0, 1, 1);
  cm.add(1, 1, 12);
  const auto r = evaluate(cm);
  EXPECT_DOUBLE_EQ(r.accuracy, 23.0 / 24.0);
  EXPECT_EQ(r.misclassified, 1u);
}

TEST(Macro, NeverPredictedClassHasZeroPrecision) {
  const std::vector<int> t = {0, 0, 1, 1};
  const std::vector<int> p = {0, 0, 0, 0};
  const auto m = macro_metrics(confusion(t, p));
  EXPECT_DOUBLE_EQ(m.precision_macro, 0.25);
  EXPECT_DOUBLE_EQ(m.recall_macro, 0.5);
}

TEST(Macro, PermutationInvariant) {
  Rng rng(6);
  const int perm[3] = {2, 0, 1};
  for (int t = 0; t < 50; ++t) {
    std::vector<int> a(40), b(40), pa(40), pb(40);
    for (std::size_t i = 0; i < 40; ++i) {
      a[i] = static_cast<int>(rng.uniform_index(3));
      b[i] = static_cast<int>(rng.uniform_index(3));
      pa[i] = perm[a[i]];
      pb[i] = perm[b[i]];
    }
    const auto m1 = macro_metrics(confusion(a, b));
    const auto m2 = macro_metrics(confusion(pa, pb));
    EXPECT_NEAR(m1.recall_macro, m2.recall_macro, 1e-12);
    EXPECT_NEAR(m1.precision_macro, m2.precision_macro, 1e-12);
    EXPECT_EQ(m1.accuracy, m2.accuracy);
  }
}

TEST(Aggregate, PerfectFoldsRender) {
  const std::vector<int> y = {0, 1, 2};
  const std::vector<EvaluationReport> folds(5, evaluate(y, y));
  const auto s = aggregate_folds(folds);
  EXPECT_EQ(format_mean_std(s.accuracy), "1.0 ± 0.00");
  EXPECT_EQ(s.folds, 5u);
}

TEST(Aggregate, HalfAndFull) {
  const auto m = mean_std(std::vector<double>{1.0, 0.5});
  EXPECT_EQ(m.mean, 0.75);
  EXPECT_EQ(m.std, 0.25);
  EXPECT_EQ(format_mean_std(m), "0.75 ± 0.25");
  EXPECT_THROW(mean_std(std::vector<double>{}), Error);
}

TEST(Aggregate, MatchesNaiveRecompute) {
  Rng rng(9);
  std::vector<EvaluationReport> reports;
  std::vector<double> acc;
  for (int f = 0; f < 7; ++f) {
    std::vector<int> t(30), p(30);
    for (std::size_t i = 0; i < 30; ++i) {
      t[i] = static_cast<int>(rng.uniform_index(3));
      p[i] = rng.uniform01() < 0.7 ? t[i] : static_cast<int>(rng.uniform_index(3));
    }
    reports.push_back(evaluate(t, p));
    acc.push_back(reports.back().accuracy);
  }
  const auto s = aggregate_folds(reports);
  double mean = 0;
  for (const double a : acc) mean += a;
  mean /= 7;
  double var = 0;
  for (const double a : acc) var += (a - mean) * (a - mean);
  EXPECT_DOUBLE_EQ(s.accuracy.mean, mean);
  EXPECT_DOUBLE_EQ(s.accuracy.std, std::sqrt(var / 7));
}

TEST(Format, Scores) {
  EXPECT_EQ(format_score(1.0), "1.0");
  EXPECT_EQ(format_score(0.96), "0.96");
  EXPECT_EQ(format_score(0.9), "0.9");
  EXPECT_EQ(format_score(0.8444), "0.84");
  EXPECT_EQ(format_score(0.0), "0.0");
  EXPECT_EQ(format_percent(11.0 / 12.0), "91.67%");
  EXPECT_EQ(format_percent(1.0), "100.00%");
}

TEST(Format, ConfusionText) {
  ConfusionMatrix cm(3);
  cm.add(0, 0, 57);
  cm.add(0, 1, 3);
  const auto text = confusion_text(cm);
  EXPECT_NE(text.find("KS"), std::string::npos);
  EXPECT_NE(text.find("57"), std::string::npos);
}

// --- trial -------------------------------------------------------------------

TEST(Trial, AccuraciesOnTwelfthGrid) {
  const auto d = testing::gaussian_blobs(30, 2, 10, 0.7, 3);
  TrialOptions opts;
  opts.budget = 6;
  const auto report = ten_run_trial(d.x, d.y, ModelSpec{}, 3, opts);
  ASSERT_EQ(report.attempts.size(), 10u);
  double sum = 0;
  for (const auto& a : report.attempts) {
    EXPECT_EQ(a.test_size, 12u);
    EXPECT_DOUBLE_EQ(a.accuracy, 1.0 - static_cast<double>(a.misclassified) / 12.0);
    const double twelfths = a.accuracy * 12.0;
    EXPECT_NEAR(twelfths, std::round(twelfths), 1e-12);
    EXPECT_EQ(a.trace.size(), 6u);
    EXPECT_EQ(a.features.size(), 3u);
    sum += a.accuracy;
  }
  EXPECT_NEAR(report.overall_accuracy, sum / 10.0, 1e-12);
  EXPECT_EQ(report.pooled.total(), 120u);
}

TEST(Trial, WellSeparatedPairAboveNinety) {
  GeneratorConfig cfg;
  cfg.seed = 4;
  const auto fm = extract_feature_matrix(generate_dataset(cfg).recordings);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fm.size(); ++i) {
    if (fm.labels[i] != HygieneClass::ToiletFlushing) rows.push_back(i);
  }
  const auto pair = fm.subset(rows);
  EXPECT_GE(ten_run_trial(pair.to_matrix(), pair.label_codes(), ModelSpec{}, 4).overall_accuracy, 0.9);
}

TEST(Trial, CsvColumns) {
  const auto d = testing::gaussian_blobs(30, 2, 10, 2.0, 5);
  TrialOptions opts;
  opts.attempts = 2;
  opts.budget = 3;
  const auto csv = trial_csv(ten_run_trial(d.x, d.y, ModelSpec{}, 5, opts));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Attempt,Features,Accuracy,Input,Misclassification");
  EXPECT_NE(csv.find("KS:6 BF:6"), std::string::npos);
}

TEST(Trial, NeedsTwoClasses) {
  const auto d = testing::gaussian_blobs(10, 3, 10, 2.0, 5);
  EXPECT_THROW(ten_run_trial(d.x, d.y, ModelSpec{}, 1), Error);
}

}  // namespace
}  // namespace hygiene
