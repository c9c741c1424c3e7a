#include "hygiene/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/rng.hpp"

namespace hygiene {

namespace {

void check_inputs(const Matrix& x, std::span<const int> y, std::size_t num_classes) {
  if (x.rows() == 0) throw Error(ErrorCode::EmptyData, "cannot grow a tree on zero rows");
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "tree: rows and labels differ in length");
  for (const int v : y) {
    if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
      throw Error(ErrorCode::InvalidArgument, "tree label " + std::to_string(v) + " outside [0, num_classes)");
    }
  }
}

// n * gini = n - sum(c^2) / n, kept unnormalized so every split compares on
// the same scale and ties are decided by counts alone.
double weighted_gini(std::span<const std::size_t> counts, std::size_t n) {
  if (n == 0) return 0.0;
  double sq = 0.0;
  for (const auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
  return static_cast<double>(n) - sq / static_cast<double>(n);
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t num_classes, const TreeParams& params,
              std::uint64_t seed)
      : x_(x), y_(y), k_(num_classes), params_(params), rng_(seed) {}

  TreeModel build(std::vector<std::size_t> rows) {
    TreeModel model;
    model.num_classes = k_;
    model.input_dim = x_.cols();
    grow(model, rows, 0);
    return model;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
  };

  int grow(TreeModel& model, std::span<std::size_t> rows, std::size_t depth) {
    std::vector<std::size_t> counts(k_, 0);
    for (const auto r : rows) counts[static_cast<std::size_t>(y_[r])]++;

    TreeNode node;
    node.class_fraction.resize(k_);
    for (std::size_t c = 0; c < k_; ++c) {
      node.class_fraction[c] = static_cast<double>(counts[c]) / static_cast<double>(rows.size());
    }
    node.label = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());

    const auto index = static_cast<int>(model.nodes.size());
    model.nodes.push_back(node);

    const bool pure = std::count(counts.begin(), counts.end(), 0) >= static_cast<std::ptrdiff_t>(k_ - 1);
    const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
    if (pure || depth_capped || rows.size() < std::max<std::size_t>(params_.min_split, 2)) return index;

    const Split split = best_split(rows, counts);
    if (split.feature < 0) return index;

    const auto mid = std::stable_partition(rows.begin(), rows.end(), [&](std::size_t r) {
      return x_(r, static_cast<std::size_t>(split.feature)) <= split.threshold;
    });
    const auto n_left = static_cast<std::size_t>(mid - rows.begin());
    const int left = grow(model, rows.subspan(0, n_left), depth + 1);
    const int right = grow(model, rows.subspan(n_left), depth + 1);

    auto& stored = model.nodes[static_cast<std::size_t>(index)];
    stored.feature = split.feature;
    stored.threshold = split.threshold;
    stored.left = left;
    stored.right = right;
    return index;
  }

  Split best_split(std::span<const std::size_t> rows, std::span<const std::size_t> parent_counts) {
    const std::size_t d = x_.cols();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::size_t wanted = d;
    if (params_.features_per_split > 0 && params_.features_per_split < d) {
      rng_.shuffle(std::span<std::size_t>(order));
      wanted = params_.features_per_split;
    }

    Split best;
    std::size_t examined = 0;
    for (const auto f : order) {
      // keep drawing beyond `wanted` only while no usable split was found
      if (examined >= wanted && best.feature >= 0) break;
      ++examined;
      scan_feature(rows, parent_counts, f, best);
    }
    return best;
  }

  void scan_feature(std::span<const std::size_t> rows, std::span<const std::size_t> parent_counts, std::size_t f,
                    Split& best) const {
    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });

    std::vector<std::size_t> left(k_, 0);
    std::vector<std::size_t> right(parent_counts.begin(), parent_counts.end());
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto label = static_cast<std::size_t>(y_[sorted[i]]);
      left[label]++;
      right[label]--;
      const double here = x_(sorted[i], f);
      const double next = x_(sorted[i + 1], f);
      if (!(here < next)) continue;
      const double score = weighted_gini(left, i + 1) + weighted_gini(right, n - i - 1);
      if (best.feature < 0 || score < best.score) {
        double threshold = here + (next - here) / 2.0;
        if (!(threshold < next)) threshold = here;  // adjacent doubles
        best = {static_cast<int>(f), threshold, score};
      }
    }
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t k_;
  TreeParams params_;
  Rng rng_;
};

}  // namespace

const TreeNode& TreeModel::leaf_for(std::span<const double> x) const {
  if (x.size() != input_dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "tree expects " + std::to_string(input_dim) + " features, got " + std::to_string(x.size()));
  }
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    const auto next = x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
    node = &nodes[static_cast<std::size_t>(next)];
  }
  return *node;
}

std::size_t TreeModel::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

TreeModel train_tree(const Matrix& x, std::span<const int> y, std::size_t num_classes, const TreeParams& params,
                     std::uint64_t seed) {
  check_inputs(x, y, num_classes);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return TreeBuilder(x, y, num_classes, params, seed).build(std::move(rows));
}

std::vector<std::size_t> forest_bootstrap_rows(std::uint64_t tree_seed, std::size_t n_rows) {
  Rng rng(derive_seed(tree_seed, {0}));
  std::vector<std::size_t> rows(n_rows);
  for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(n_rows));
  return rows;
}

ForestModel train_forest(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                         const ForestParams& params, std::uint64_t seed) {
  check_inputs(x, y, num_classes);
  if (params.n_trees == 0) throw Error(ErrorCode::InvalidArgument, "forest needs at least one tree");

  TreeParams tree_params = params.tree;
  tree_params.features_per_split =
      params.features_per_split > 0
          ? params.features_per_split
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));

  ForestModel model;
  model.bootstrap = params.bootstrap;
  model.num_classes = num_classes;
  model.input_dim = x.cols();
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    const auto tree_seed = derive_seed(seed, {t});
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
      rows = forest_bootstrap_rows(tree_seed, x.rows());
    } else {
      rows.resize(x.rows());
      std::iota(rows.begin(), rows.end(), 0);
    }
    const Matrix sample = x.select_rows(rows);
    const auto labels = select<int>(y, rows);
    model.trees.push_back(train_tree(sample, labels, num_classes, tree_params, derive_seed(tree_seed, {1})));
    model.tree_seeds.push_back(tree_seed);
  }
  return model;
}

std::vector<double> ForestModel::vote_fraction(std::span<const double> x) const {
  std::vector<double> votes(num_classes, 0.0);
  for (const auto& tree : trees) votes[static_cast<std::size_t>(tree.predict(x))] += 1.0;
  for (auto& v : votes) v /= static_cast<double>(trees.size());
  return votes;
}

int ForestModel::predict(std::span<const double> x) const {
  const auto votes = vote_fraction(x);
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

double forest_oob_accuracy(const ForestModel& model, const Matrix& x, std::span<const int> y) {
  if (!model.bootstrap) throw Error(ErrorCode::InvalidArgument, "out-of-bag accuracy needs a bootstrapped forest");
  const std::size_t n = x.rows();
  std::vector<std::vector<double>> votes(n, std::vector<double>(model.num_classes, 0.0));
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    std::vector<bool> in_bag(n, false);
    for (const auto r : forest_bootstrap_rows(model.tree_seeds[t], n)) in_bag[r] = true;
    for (std::size_t r = 0; r < n; ++r) {
      if (!in_bag[r]) votes[r][static_cast<std::size_t>(model.trees[t].predict(x.row(r)))] += 1.0;
    }
  }
  std::size_t scored = 0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto total = std::accumulate(votes[r].begin(), votes[r].end(), 0.0);
    if (total == 0.0) continue;
    ++scored;
    const auto pred = std::max_element(votes[r].begin(), votes[r].end()) - votes[r].begin();
    if (pred == y[r]) ++correct;
  }
  if (scored == 0) throw Error(ErrorCode::EmptyData, "no out-of-bag rows");
  return static_cast<double>(correct) / static_cast<double>(scored);
}

}  // namespace hygiene
