#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hygiene/features.hpp"
#include "hygiene/gnb.hpp"
#include "hygiene/logreg.hpp"
#include "hygiene/matrix.hpp"
#include "hygiene/mlp.hpp"
#include "hygiene/svm.hpp"
#include "hygiene/tree.hpp"

namespace hygiene {

enum class Family { DecisionTree, RandomForest, NaiveBayes, LogisticRegression, Svm, NeuralNetwork };

/// Report order.
inline constexpr std::array<Family, 6> kAllFamilies = {Family::DecisionTree,       Family::RandomForest,
                                                       Family::NaiveBayes,         Family::LogisticRegression,
                                                       Family::Svm,                Family::NeuralNetwork};

/// "dt", "rf", "nb", "lr", "svm", "nn".
std::string_view family_tag(Family f) noexcept;
/// "DT", "RF", "NB", "LR", "SVM", "NN".
std::string_view family_label(Family f) noexcept;
Family family_from_tag(std::string_view tag);

/// A family plus the hyperparameters of every family.
struct ModelSpec {
  Family family = Family::Svm;
  SvmParams svm;
  TreeParams tree;
  ForestParams forest;
  GnbParams gnb;
  LogRegParams logreg;
  MlpParams mlp;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

using TrainedModel = std::variant<SvmModel, TreeModel, ForestModel, GnbModel, LogRegModel, MlpModel>;

Family family_of(const TrainedModel& model) noexcept;
std::size_t input_dim(const TrainedModel& model) noexcept;

/// Positive-class score of a binary model: signed margin for the SVM, leaf
/// or vote fraction for trees and forests, probability otherwise.
double decision_score(const TrainedModel& model, std::span<const double> x);
/// Scores strictly above this value predict the positive class.
double decision_threshold(Family f) noexcept;
int predict_binary(const TrainedModel& model, std::span<const double> x);

/// Trains one binary head on 0/1 labels. The network holds out a stratified
/// share of the rows for early stopping.
TrainedModel train_binary(const ModelSpec& spec, const Matrix& x, std::span<const int> y01, std::uint64_t seed);

/// Two-class problem: the head scores `positive` against `negative`.
struct BinaryModel {
  int negative = 0;
  int positive = 1;
  TrainedModel head;

  int predict(std::span<const double> x) const;
};

/// One head per class, `classes` ascending.
struct OvrModel {
  std::vector<int> classes;
  std::vector<TrainedModel> heads;

  std::vector<double> scores(std::span<const double> x) const;
  /// Argmax of the head scores; lowest class code on ties.
  int predict(std::span<const double> x) const;
};

using Classifier = std::variant<BinaryModel, OvrModel>;

/// Binary when exactly two labels occur, one-vs-rest otherwise.
Classifier train_classifier(const ModelSpec& spec, const Matrix& x, std::span<const int> labels, std::uint64_t seed);
Family family_of(const Classifier& c) noexcept;
std::size_t input_dim(const Classifier& c) noexcept;
int predict(const Classifier& c, std::span<const double> x);
std::vector<int> predict(const Classifier& c, const Matrix& x);

/// Column choice (1-based feature indices, ascending) plus the classifier
/// trained on those columns.
struct FittedPipeline {
  std::vector<int> features;
  Classifier classifier;
  /// Free-form provenance (resolved config, seeds); saved with the model.
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Picks the pipeline's columns out of full feature rows.
  Matrix project(const Matrix& full) const;
  std::vector<int> predict(const Matrix& full) const;
};

/// Zero-based column indices for 1-based feature numbers; throws OutOfRange.
std::vector<std::size_t> feature_columns(std::span<const int> features);

// --- serialization -------------------------------------------------------

std::string pipeline_to_json(const FittedPipeline& pipeline);
/// Throws MalformedModel.
FittedPipeline pipeline_from_json(std::string_view text);
void save_pipeline(const FittedPipeline& pipeline, const std::filesystem::path& path);
FittedPipeline load_pipeline(const std::filesystem::path& path);

}  // namespace hygiene
