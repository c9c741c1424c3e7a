#include "hygiene/model.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/rng.hpp"

namespace hygiene {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(std::size_t expected, std::span<const double> x) {
  if (x.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "model expects " + std::to_string(expected) + " features, got " + std::to_string(x.size()));
  }
}

void require_both_labels(std::span<const int> y) {
  bool neg = false, pos = false;
  for (const int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "binary labels must be 0 or 1");
    (v == 1 ? pos : neg) = true;
  }
  if (!neg || !pos) throw Error(ErrorCode::InsufficientClasses, "binary training needs both classes");
}

// Stratified hold-out for the network's early stopping.
void carve_validation(std::span<const int> y, double fraction, std::uint64_t seed, std::vector<std::size_t>& train,
                      std::vector<std::size_t>& val) {
  Rng rng(seed);
  for (const int label : {0, 1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) rows.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(rows));
    auto n_val = static_cast<std::size_t>(fraction * static_cast<double>(rows.size()) + 1e-9);
    if (n_val >= rows.size()) n_val = rows.empty() ? 0 : rows.size() - 1;
    val.insert(val.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_val));
    train.insert(train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_val), rows.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
}

}  // namespace

std::string_view family_tag(Family f) noexcept {
  switch (f) {
    case Family::DecisionTree: return "dt";
    case Family::RandomForest: return "rf";
    case Family::NaiveBayes: return "nb";
    case Family::LogisticRegression: return "lr";
    case Family::Svm: return "svm";
    case Family::NeuralNetwork: return "nn";
  }
  return "?";
}

std::string_view family_label(Family f) noexcept {
  switch (f) {
    case Family::DecisionTree: return "DT";
    case Family::RandomForest: return "RF";
    case Family::NaiveBayes: return "NB";
    case Family::LogisticRegression: return "LR";
    case Family::Svm: return "SVM";
    case Family::NeuralNetwork: return "NN";
  }
  return "?";
}

Family family_from_tag(std::string_view tag) {
  for (const auto f : kAllFamilies) {
    if (tag == family_tag(f) || tag == family_label(f)) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model family '" + std::string(tag) + "'");
}

Family family_of(const TrainedModel& model) noexcept {
  return std::visit(Overloaded{[](const SvmModel&) { return Family::Svm; },
                               [](const TreeModel&) { return Family::DecisionTree; },
                               [](const ForestModel&) { return Family::RandomForest; },
                               [](const GnbModel&) { return Family::NaiveBayes; },
                               [](const LogRegModel&) { return Family::LogisticRegression; },
                               [](const MlpModel&) { return Family::NeuralNetwork; }},
                    model);
}

std::size_t input_dim(const TrainedModel& model) noexcept {
  return std::visit(Overloaded{[](const SvmModel& m) { return m.input_dim; },
                               [](const TreeModel& m) { return m.input_dim; },
                               [](const ForestModel& m) { return m.input_dim; },
                               [](const GnbModel& m) { return m.input_dim(); },
                               [](const LogRegModel& m) { return m.input_dim(); },
                               [](const MlpModel& m) { return m.input_dim(); }},
                    model);
}

double decision_score(const TrainedModel& model, std::span<const double> x) {
  check_dim(input_dim(model), x);
  return std::visit(Overloaded{[&](const SvmModel& m) { return m.decision(x); },
                               [&](const TreeModel& m) { return m.leaf_for(x).class_fraction.at(1); },
                               [&](const ForestModel& m) { return m.vote_fraction(x).at(1); },
                               [&](const GnbModel& m) { return m.posterior(x).at(1); },
                               [&](const LogRegModel& m) { return m.probability(x); },
                               [&](const MlpModel& m) { return m.probability(x); }},
                    model);
}

double decision_threshold(Family f) noexcept { return f == Family::Svm ? 0.0 : 0.5; }

int predict_binary(const TrainedModel& model, std::span<const double> x) {
  return decision_score(model, x) > decision_threshold(family_of(model)) ? 1 : 0;
}

TrainedModel train_binary(const ModelSpec& spec, const Matrix& x, std::span<const int> y01, std::uint64_t seed) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyData, "no training rows");
  if (x.rows() != y01.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  switch (spec.family) {
    case Family::Svm:
      return train_svm(x, y01, spec.svm);
    case Family::DecisionTree:
      return train_tree(x, y01, 2, spec.tree, seed);
    case Family::RandomForest:
      return train_forest(x, y01, 2, spec.forest, seed);
    case Family::NaiveBayes:
      require_both_labels(y01);
      return train_gnb(x, y01, 2, spec.gnb);
    case Family::LogisticRegression:
      require_both_labels(y01);
      return train_logreg(x, y01, spec.logreg);
    case Family::NeuralNetwork: {
      std::vector<std::size_t> train_rows, val_rows;
      carve_validation(y01, spec.mlp.validation_fraction, derive_seed(seed, {0}), train_rows, val_rows);
      return train_mlp(x.select_rows(train_rows), select<int>(y01, train_rows), x.select_rows(val_rows),
                       select<int>(y01, val_rows), spec.mlp, derive_seed(seed, {1}));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model family");
}

int BinaryModel::predict(std::span<const double> x) const { return predict_binary(head, x) == 1 ? positive : negative; }

std::vector<double> OvrModel::scores(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(heads.size());
  for (const auto& head : heads) out.push_back(decision_score(head, x));
  return out;
}

int OvrModel::predict(std::span<const double> x) const {
  const auto s = scores(x);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[best]) best = i;
  }
  return classes.at(best);
}

Classifier train_classifier(const ModelSpec& spec, const Matrix& x, std::span<const int> labels,
                            std::uint64_t seed) {
  if (x.rows() != labels.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::InsufficientClasses, "training needs at least two classes, got " +
                                                    std::to_string(distinct.size()));
  }
  if (distinct.size() == 2) {
    BinaryModel model;
    model.negative = *distinct.begin();
    model.positive = *distinct.rbegin();
    std::vector<int> y01;
    y01.reserve(labels.size());
    for (const int v : labels) y01.push_back(v == model.positive ? 1 : 0);
    model.head = train_binary(spec, x, y01, seed);
    return model;
  }
  OvrModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  for (const int cls : model.classes) {
    std::vector<int> y01;
    y01.reserve(labels.size());
    for (const int v : labels) y01.push_back(v == cls ? 1 : 0);
    model.heads.push_back(train_binary(spec, x, y01, derive_seed(seed, {static_cast<std::uint64_t>(cls)})));
  }
  return model;
}

Family family_of(const Classifier& c) noexcept {
  return std::visit(Overloaded{[](const BinaryModel& m) { return family_of(m.head); },
                               [](const OvrModel& m) { return family_of(m.heads.front()); }},
                    c);
}

std::size_t input_dim(const Classifier& c) noexcept {
  return std::visit(Overloaded{[](const BinaryModel& m) { return input_dim(m.head); },
                               [](const OvrModel& m) { return input_dim(m.heads.front()); }},
                    c);
}

int predict(const Classifier& c, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, c);
}

std::vector<int> predict(const Classifier& c, const Matrix& x) {
  std::vector<int> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict(c, x.row(r)));
  return out;
}

std::vector<std::size_t> feature_columns(std::span<const int> features) {
  std::vector<std::size_t> cols;
  cols.reserve(features.size());
  for (const int f : features) {
    if (f < 1) throw Error(ErrorCode::OutOfRange, "feature index " + std::to_string(f) + " below 1");
    cols.push_back(static_cast<std::size_t>(f - 1));
  }
  return cols;
}

Matrix FittedPipeline::project(const Matrix& full) const {
  for (const int f : features) {
    if (f > static_cast<int>(full.cols())) {
      throw Error(ErrorCode::DimensionMismatch, "pipeline uses feature " + std::to_string(f) + " but rows have " +
                                                    std::to_string(full.cols()) + " columns");
    }
  }
  return full.select_cols(feature_columns(features));
}

std::vector<int> FittedPipeline::predict(const Matrix& full) const { return hygiene::predict(classifier, project(full)); }

}  // namespace hygiene
