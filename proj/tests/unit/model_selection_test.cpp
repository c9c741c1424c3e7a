#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "fixtures.hpp"
#include "hygiene/error.hpp"
#include "hygiene/features.hpp"
#include "hygiene/model_selection.hpp"
#include "hygiene/synthgen.hpp"

namespace hygiene {
namespace {

std::vector<int> balanced_labels(std::size_t per_class, std::size_t classes) {
  std::vector<int> y;
  for (std::size_t c = 0; c < classes; ++c) y.insert(y.end(), per_class, static_cast<int>(c));
  return y;
}

std::map<int, std::size_t> class_counts(std::span<const int> y, std::span<const std::size_t> rows) {
  std::map<int, std::size_t> counts;
  for (const auto r : rows) counts[y[r]]++;
  return counts;
}

TEST(Split, FortyEightTwelve) {
  const auto y = balanced_labels(30, 2);
  const auto plan = stratified_split(y, 0.8, 1);
  EXPECT_EQ(plan.train.size(), 48u);
  EXPECT_EQ(plan.test.size(), 12u);
  EXPECT_EQ(class_counts(y, plan.test)[0], 6u);
  EXPECT_EQ(class_counts(y, plan.test)[1], 6u);
}

TEST(Split, ThreeClassArithmetic) {
  const auto y = balanced_labels(30, 3);
  const auto plan = stratified_split(y, 0.8, 2);
  EXPECT_EQ(plan.train.size(), 72u);
  EXPECT_EQ(plan.test.size(), 18u);
  for (const auto& [cls, n] : class_counts(y, plan.train)) EXPECT_EQ(n, 24u) << cls;
}

TEST(Split, PartitionAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    std::vector<int> y;
    for (int i = 0; i < 40 + static_cast<int>(rng.uniform_index(40)); ++i) y.push_back(static_cast<int>(rng.uniform_index(3)));
    for (int c = 0; c < 3; ++c) y.insert(y.end(), 5, c);
    const auto plan = stratified_split(y, 0.8, seed);
    std::vector<std::size_t> all = plan.train;
    all.insert(all.end(), plan.test.begin(), plan.test.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), y.size());
    for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
    EXPECT_TRUE(std::is_sorted(plan.train.begin(), plan.train.end()));
    const auto total = class_counts(y, all);
    const auto train = class_counts(y, plan.train);
    for (const auto& [cls, n] : total) {
      const auto want = static_cast<std::size_t>(0.8 * static_cast<double>(n) + 1e-9);
      EXPECT_EQ(train.at(cls), want);
    }
    const auto again = stratified_split(y, 0.8, seed);
    EXPECT_EQ(again.train, plan.train);
  }
}

TEST(Split, FlooringOnUnevenCounts) {
  const auto y = balanced_labels(7, 2);
  const auto plan = stratified_split(y, 0.8, 0);
  EXPECT_EQ(class_counts(y, plan.train)[0], 5u);
  EXPECT_EQ(class_counts(y, plan.test)[0], 2u);
}

TEST(Split, TooFewSamples) {
  EXPECT_THROW(stratified_split(balanced_labels(4, 2), 0.8, 0), Error);
}

TEST(Split, JsonCarriesPlan) {
  const auto plan = stratified_split(balanced_labels(5, 2), 0.8, 77);
  const auto j = nlohmann::json::parse(plan.to_json());
  EXPECT_EQ(j["seed"], 77);
  EXPECT_EQ(j["train"].get<std::vector<std::size_t>>(), plan.train);
  EXPECT_EQ(j["test"].get<std::vector<std::size_t>>(), plan.test);
}

TEST(KFold, SixPerClassPerFold) {
  const auto y = balanced_labels(30, 3);
  const auto plan = stratified_kfold(y, 5, 3);
  ASSERT_EQ(plan.k(), 5u);
  std::set<std::size_t> seen;
  for (const auto& fold : plan.folds) {
    EXPECT_EQ(fold.size(), 18u);
    for (const auto& [cls, n] : class_counts(y, fold)) EXPECT_EQ(n, 6u) << cls;
    for (const auto r : fold) EXPECT_TRUE(seen.insert(r).second);
  }
  EXPECT_EQ(seen.size(), 90u);
}

TEST(KFold, UnevenCountsDifferByAtMostOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<int> y;
    for (int c = 0; c < 3; ++c) y.insert(y.end(), 5 + rng.uniform_index(20), c);
    const auto plan = stratified_kfold(y, 5, seed);
    std::size_t lo = y.size(), hi = 0;
    for (int c = 0; c < 3; ++c) {
      std::size_t clo = y.size(), chi = 0;
      for (const auto& fold : plan.folds) {
        const auto n = class_counts(y, fold)[c];
        clo = std::min(clo, n);
        chi = std::max(chi, n);
      }
      EXPECT_LE(chi - clo, 1u);
    }
    for (const auto& fold : plan.folds) {
      lo = std::min(lo, fold.size());
      hi = std::max(hi, fold.size());
    }
    EXPECT_LE(hi - lo, 1u);
    const auto train0 = plan.training_rows(0);
    EXPECT_EQ(train0.size() + plan.folds[0].size(), y.size());
  }
}

TEST(KFold, Errors) {
  EXPECT_THROW(stratified_kfold(balanced_labels(4, 2), 5, 0), Error);
}

FitPredict majority_class() {
  return [](const Matrix&, std::span<const int> train_y, const Matrix& test_x) {
    std::map<int, int> counts;
    for (const int v : train_y) counts[v]++;
    int best = counts.begin()->first;
    for (const auto& [cls, n] : counts) {
      if (n > counts[best]) best = cls;
    }
    return std::vector<int>(test_x.rows(), best);
  };
}

TEST(CvError, MajorityClassOnBalancedData) {
  const auto y = balanced_labels(30, 3);
  const Matrix x(90, 2, 0.0);
  const auto plan = stratified_kfold(y, 5, 1);
  EXPECT_NEAR(cv_error(x, y, plan, majority_class()), 2.0 / 3.0, 1e-12);
}

TEST(Selection, EnumeratesAllTriples) {
  const auto d = testing::gaussian_blobs(10, 2, 10, 1.0, 1);
  const auto plan = stratified_kfold(d.y, 5, 1);
  std::size_t calls = 0;
  std::set<std::vector<double>> seen_first_rows;
  const FitPredict counting = [&](const Matrix& tx, std::span<const int> ty, const Matrix& test_x) {
    ++calls;
    EXPECT_EQ(tx.cols(), 3u);
    return majority_class()(tx, ty, test_x);
  };
  const auto best = select_best_features(d.x, d.y, counting, plan);
  EXPECT_EQ(best.evaluated, 120u);
  EXPECT_EQ(calls, 600u);
  // all subsets tie: lexicographically smallest wins
  EXPECT_EQ(best.features, (std::array<int, 3>{1, 2, 3}));
}

TEST(Selection, TieBreakPrefersSmallerTriple) {
  auto d = testing::gaussian_blobs(15, 2, 10, 0.0, 2);
  // columns 2 and 5 are perfect copies of the label: {1,2,x} and {2,..} triples all hit 0
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    d.x(r, 4) = d.y[r] * 10.0;
    d.x(r, 1) = d.y[r] * 10.0;
  }
  const auto plan = stratified_kfold(d.y, 5, 3);
  ModelSpec spec;
  spec.family = Family::DecisionTree;
  const auto best = select_best_features(d.x, d.y, make_fit_predict(spec, 0), plan);
  EXPECT_EQ(best.cv_loss, 0.0);
  EXPECT_EQ(best.features, (std::array<int, 3>{1, 2, 3}));
}

TEST(Selection, RecoversPlantedTriple) {
  const auto d = testing::planted_triple(30, {1, 2, 10}, 5);
  const auto plan = stratified_kfold(d.y, 5, 5);
  const auto best = select_best_features(d.x, d.y, make_fit_predict(ModelSpec{}, 5), plan);
  EXPECT_EQ(best.features, (std::array<int, 3>{1, 2, 10}));
  EXPECT_TRUE(std::is_sorted(best.features.begin(), best.features.end()));
}

TEST(Selection, PureNoiseLossNearChance) {
  Rng rng(17);
  Matrix x(200, 10);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < 10; ++c) x(r, c) = rng.normal();
  }
  const auto y = balanced_labels(100, 2);
  const auto plan = stratified_kfold(y, 5, 17);
  const auto best = select_best_features(x, y, make_fit_predict(ModelSpec{}, 17), plan);
  EXPECT_NEAR(best.cv_loss, 0.5, 0.15);
  EXPECT_TRUE(best.features[0] < best.features[1] && best.features[1] < best.features[2]);
}

TEST(Tuning, TraceShape) {
  const auto d = testing::gaussian_blobs(20, 2, 3, 2.5, 6);
  const auto plan = stratified_kfold(d.y, 5, 6);
  const auto r = tune_hyperparameters(d.x, d.y, 30, 6, plan);
  ASSERT_EQ(r.trace.size(), 30u);
  double best = 1.0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& s = r.trace[i];
    EXPECT_EQ(s.iteration, i + 1);
    EXPECT_GE(s.c, kTuneCMin);
    EXPECT_LE(s.c, kTuneCMax);
    EXPECT_GE(s.gamma, kTuneGammaMin);
    EXPECT_LE(s.gamma, kTuneGammaMax);
    best = std::min(best, s.loss);
    EXPECT_EQ(s.best_so_far, best);
    if (i > 0) EXPECT_LE(s.best_so_far, r.trace[i - 1].best_so_far);
  }
  EXPECT_EQ(r.loss, best);
  EXPECT_LE(r.loss, 0.1);
}

TEST(Tuning, DrawsAreReproducibleFromSeed) {
  const auto d = testing::gaussian_blobs(10, 2, 2, 2.0, 7);
  const auto plan = stratified_kfold(d.y, 5, 7);
  const auto r = tune_hyperparameters(d.x, d.y, 5, 99, plan);
  for (std::size_t i = 0; i < 5; ++i) {
    Rng rng(derive_seed(99, {i}));
    const double c = rng.log_uniform(kTuneCMin, kTuneCMax);
    EXPECT_EQ(r.trace[i].c, c);
    EXPECT_EQ(r.trace[i].gamma, rng.log_uniform(kTuneGammaMin, kTuneGammaMax));
  }
}

TEST(CrossValidate, FiveReportsOfEighteen) {
  const auto d = testing::gaussian_blobs(30, 3, 10, 20.0, 8);
  const auto plan = stratified_kfold(d.y, 5, 8);
  ModelSpec spec;
  spec.family = Family::DecisionTree;
  const auto reports = cross_validate(spec, d.x, d.y, plan);
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.confusion.total(), 18u);
    EXPECT_EQ(r.accuracy, 1.0);
  }
}

TEST(CrossValidate, SeparableSyntheticFeaturesGivePerfectTrees) {
  GeneratorConfig cfg;
  cfg.seed = 3;
  cfg.n_per_class = 30;
  const auto data = generate_dataset(cfg);
  const auto fm = extract_feature_matrix(data.recordings);
  const auto x = fm.to_matrix();
  const auto y = fm.label_codes();
  // keep only the two classes the bursts separate outright
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0) rows.push_back(i);
  }
  const auto sub_x = x.select_rows(rows);
  const auto sub_y = select<int>(y, rows);
  const auto plan = stratified_kfold(sub_y, 5, 3);
  ModelSpec spec;
  spec.family = Family::DecisionTree;
  for (const auto& r : cross_validate(spec, sub_x, sub_y, plan, {}, 3)) EXPECT_EQ(r.accuracy, 1.0);
}

TEST(NoLeakage, TestRowsDoNotInfluenceFit) {
  auto d = testing::gaussian_blobs(20, 2, 10, 1.5, 9);
  const auto split = stratified_split(d.y, 0.8, 9);
  const auto train_x = d.x.select_rows(split.train);
  const auto train_y = select<int>(d.y, split.train);
  CvOptions opts;
  opts.select_features = true;
  opts.tune = true;
  opts.budget = 5;
  const auto a = fit_pipeline(ModelSpec{}, train_x, train_y, opts, 4);

  // scramble the held-out rows; the fit on the training rows cannot move
  for (const auto r : split.test) {
    for (std::size_t c = 0; c < 10; ++c) d.x(r, c) = 1e6;
  }
  const auto b = fit_pipeline(ModelSpec{}, d.x.select_rows(split.train), train_y, opts, 4);
  EXPECT_EQ(pipeline_to_json(a.pipeline), pipeline_to_json(b.pipeline));
  EXPECT_EQ(a.selection->features, b.selection->features);
}

TEST(FitPipeline, DefaultsUseAllColumns) {
  const auto d = testing::gaussian_blobs(10, 2, 4, 3.0, 10);
  const auto fit = fit_pipeline(ModelSpec{}, d.x, d.y, {}, 1);
  EXPECT_EQ(fit.pipeline.features, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_FALSE(fit.selection.has_value());
  EXPECT_FALSE(fit.tuning.has_value());
}

}  // namespace
}  // namespace hygiene
