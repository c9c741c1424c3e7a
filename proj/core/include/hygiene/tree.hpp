#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hygiene/matrix.hpp"

namespace hygiene {

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_split = 2;
  /// Features examined per split; 0 or >= d means all, in column order.
  std::size_t features_per_split = 0;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Internal nodes send x[feature] <= threshold left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;                       // majority class, lowest code on ties
  std::vector<double> class_fraction;  // training distribution reaching the node

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t num_classes = 2;
  std::size_t input_dim = 0;

  const TreeNode& leaf_for(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return leaf_for(x).label; }
  std::size_t depth() const;

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

/// CART with Gini impurity; thresholds at midpoints between sorted unique
/// values. Labels must lie in [0, num_classes).
TreeModel train_tree(const Matrix& x, std::span<const int> y, std::size_t num_classes, const TreeParams& params = {},
                     std::uint64_t seed = 0);

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t features_per_split = 0;  // 0 = ceil(sqrt(d))
  bool bootstrap = true;
  TreeParams tree;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;
  bool bootstrap = true;
  std::size_t num_classes = 2;
  std::size_t input_dim = 0;

  /// Fraction of trees voting for each class.
  std::vector<double> vote_fraction(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

ForestModel train_forest(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                         const ForestParams& params = {}, std::uint64_t seed = 0);

/// Rows drawn into tree `t`'s bootstrap sample, regenerated from its seed.
std::vector<std::size_t> forest_bootstrap_rows(std::uint64_t tree_seed, std::size_t n_rows);

/// Accuracy of out-of-bag majority votes over rows left out by at least one
/// tree. Requires a bootstrapped forest trained on exactly (x, y).
double forest_oob_accuracy(const ForestModel& model, const Matrix& x, std::span<const int> y);

}  // namespace hygiene
