#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/model.hpp"

namespace hygiene {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr std::string_view kFormatName = "hygiene-model";

[[noreturn]] void malformed(const std::string& detail) { throw Error(ErrorCode::MalformedModel, detail); }

json matrix_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) malformed("matrix data has " + std::to_string(data.size()) + " values");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  }
  return m;
}

json scaler_json(const std::optional<ScalerParams>& s) {
  if (!s) return nullptr;
  return json{{"mean", s->mean}, {"stddev", s->stddev}, {"degenerate", s->degenerate}};
}

std::optional<ScalerParams> scaler_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  ScalerParams s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  s.degenerate = j.at("degenerate").get<std::vector<bool>>();
  if (s.stddev.size() != s.mean.size() || s.degenerate.size() != s.mean.size()) malformed("scaler shape");
  return s;
}

json tree_json(const TreeModel& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"label", n.label},
                     {"class_fraction", n.class_fraction}});
  }
  return json{{"num_classes", t.num_classes}, {"input_dim", t.input_dim}, {"nodes", nodes}};
}

TreeModel tree_from(const json& j) {
  TreeModel t;
  t.num_classes = j.at("num_classes").get<std::size_t>();
  t.input_dim = j.at("input_dim").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.label = n.at("label").get<int>();
    node.class_fraction = n.at("class_fraction").get<std::vector<double>>();
    t.nodes.push_back(std::move(node));
  }
  const auto count = static_cast<int>(t.nodes.size());
  if (count == 0) malformed("tree has no nodes");
  for (const auto& n : t.nodes) {
    if (n.class_fraction.size() != t.num_classes) malformed("tree node class fractions");
    if (n.is_leaf()) continue;
    if (n.feature >= static_cast<int>(t.input_dim) || n.left <= 0 || n.right <= 0 || n.left >= count ||
        n.right >= count) {
      malformed("tree node references out of range");
    }
  }
  return t;
}

json head_json(const TrainedModel& model) {
  json j{{"family", family_tag(family_of(model))}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SvmModel>) {
          j["c"] = m.c;
          j["gamma"] = m.gamma;
          j["bias"] = m.bias;
          j["input_dim"] = m.input_dim;
          j["support_vectors"] = matrix_json(m.support_vectors);
          j["dual_coef"] = m.dual_coef;
          j["scaler"] = scaler_json(m.scaler);
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          j["tree"] = tree_json(m);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) trees.push_back(tree_json(t));
          j["trees"] = trees;
          j["tree_seeds"] = m.tree_seeds;
          j["bootstrap"] = m.bootstrap;
          j["num_classes"] = m.num_classes;
          j["input_dim"] = m.input_dim;
        } else if constexpr (std::is_same_v<T, GnbModel>) {
          j["prior"] = m.prior;
          j["mean"] = matrix_json(m.mean);
          j["variance"] = matrix_json(m.variance);
          j["variance_floor"] = m.variance_floor;
        } else if constexpr (std::is_same_v<T, LogRegModel>) {
          j["weights"] = m.weights;
          j["scaler"] = scaler_json(m.scaler);
          j["iterations"] = m.iterations;
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          json layers = json::array();
          for (const auto& layer : m.network.layers()) {
            layers.push_back({{"weights", matrix_json(layer.weights)}, {"bias", layer.bias}});
          }
          j["layers"] = layers;
          j["scaler"] = scaler_json(m.scaler);
          j["train_loss"] = m.train_loss;
          j["val_loss"] = m.val_loss;
        }
      },
      model);
  return j;
}

TrainedModel head_from(const json& j) {
  switch (family_from_tag(j.at("family").get<std::string>())) {
    case Family::Svm: {
      SvmModel m;
      m.c = j.at("c").get<double>();
      m.gamma = j.at("gamma").get<double>();
      m.bias = j.at("bias").get<double>();
      m.input_dim = j.at("input_dim").get<std::size_t>();
      m.support_vectors = matrix_from(j.at("support_vectors"));
      m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
      m.scaler = scaler_from(j.at("scaler"));
      if (m.dual_coef.size() != m.support_vectors.rows() ||
          (m.support_vectors.rows() > 0 && m.support_vectors.cols() != m.input_dim)) {
        malformed("svm support vector shape");
      }
      return m;
    }
    case Family::DecisionTree:
      return tree_from(j.at("tree"));
    case Family::RandomForest: {
      ForestModel m;
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from(t));
      m.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
      m.bootstrap = j.at("bootstrap").get<bool>();
      m.num_classes = j.at("num_classes").get<std::size_t>();
      m.input_dim = j.at("input_dim").get<std::size_t>();
      if (m.trees.empty() || m.tree_seeds.size() != m.trees.size()) malformed("forest has no trees");
      return m;
    }
    case Family::NaiveBayes: {
      GnbModel m;
      m.prior = j.at("prior").get<std::vector<double>>();
      m.mean = matrix_from(j.at("mean"));
      m.variance = matrix_from(j.at("variance"));
      m.variance_floor = j.at("variance_floor").get<double>();
      if (m.mean.rows() != m.prior.size() || m.variance.rows() != m.prior.size() ||
          m.variance.cols() != m.mean.cols()) {
        malformed("naive Bayes parameter shape");
      }
      return m;
    }
    case Family::LogisticRegression: {
      LogRegModel m;
      m.weights = j.at("weights").get<std::vector<double>>();
      m.scaler = scaler_from(j.at("scaler"));
      m.iterations = j.at("iterations").get<std::size_t>();
      if (m.weights.empty()) malformed("logistic regression has no weights");
      return m;
    }
    case Family::NeuralNetwork: {
      MlpModel m;
      std::vector<MlpNetwork::Layer> layers;
      for (const auto& l : j.at("layers")) {
        layers.push_back({matrix_from(l.at("weights")), l.at("bias").get<std::vector<double>>()});
      }
      if (layers.empty()) malformed("network has no layers");
      m.network = MlpNetwork(std::move(layers));
      m.scaler = scaler_from(j.at("scaler"));
      m.train_loss = j.at("train_loss").get<std::vector<double>>();
      m.val_loss = j.at("val_loss").get<std::vector<double>>();
      return m;
    }
  }
  malformed("unknown family");
}

}  // namespace

std::string pipeline_to_json(const FittedPipeline& pipeline) {
  json j{{"format", kFormatName}, {"version", kFormatVersion}, {"features", pipeline.features}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, BinaryModel>) {
          j["kind"] = "binary";
          j["classes"] = {c.negative, c.positive};
          j["heads"] = json::array({head_json(c.head)});
        } else {
          j["kind"] = "one_vs_rest";
          j["classes"] = c.classes;
          json heads = json::array();
          for (const auto& h : c.heads) heads.push_back(head_json(h));
          j["heads"] = heads;
        }
      },
      pipeline.classifier);
  j["family"] = family_tag(family_of(pipeline.classifier));
  json meta = json::array();
  for (const auto& [key, value] : pipeline.metadata) meta.push_back({key, value});
  j["metadata"] = meta;
  return j.dump(1) + "\n";
}

FittedPipeline pipeline_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatName) malformed("not a model file");
    if (j.at("version").get<int>() != kFormatVersion) {
      malformed("unsupported model version " + std::to_string(j.at("version").get<int>()));
    }
    FittedPipeline p;
    p.features = j.at("features").get<std::vector<int>>();
    for (const int f : p.features) {
      if (f < 1 || f > static_cast<int>(kNumFeatures)) malformed("feature index " + std::to_string(f));
    }
    if (j.contains("metadata")) {
      for (const auto& kv : j.at("metadata")) {
        p.metadata.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
      }
    }
    const auto kind = j.at("kind").get<std::string>();
    const auto classes = j.at("classes").get<std::vector<int>>();
    std::vector<TrainedModel> heads;
    for (const auto& h : j.at("heads")) heads.push_back(head_from(h));
    if (kind == "binary") {
      if (classes.size() != 2 || heads.size() != 1) malformed("binary model needs 2 classes and 1 head");
      p.classifier = BinaryModel{classes[0], classes[1], std::move(heads.front())};
    } else if (kind == "one_vs_rest") {
      if (classes.size() != heads.size() || heads.empty()) malformed("one head per class expected");
      p.classifier = OvrModel{classes, std::move(heads)};
    } else {
      malformed("unknown model kind '" + kind + "'");
    }
    if (!p.features.empty() && input_dim(p.classifier) != p.features.size()) {
      malformed("model width does not match its feature list");
    }
    return p;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedModel) throw;
    throw Error(ErrorCode::MalformedModel, e.detail());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedModel, e.what());
  }
}

void save_pipeline(const FittedPipeline& pipeline, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileMissing, "cannot write " + path.string());
  out << pipeline_to_json(pipeline);
}

FittedPipeline load_pipeline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ErrorCode::FileMissing, path.string(), 0, "cannot open model file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return pipeline_from_json(buf.str());
  } catch (const Error& e) {
    throw ParseError(e.code(), path.string(), 0, e.detail());
  }
}

}  // namespace hygiene
