#include "hygiene/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hygiene/error.hpp"

namespace hygiene {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

MlpNetwork::MlpNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].weights.rows() ||
        (l > 0 && layers_[l].weights.cols() != layers_[l - 1].weights.rows())) {
      throw Error(ErrorCode::DimensionMismatch, "network layer " + std::to_string(l) + " has inconsistent shape");
    }
  }
  if (!layers_.empty() && layers_.back().weights.rows() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "network must end in a single output unit");
  }
}

MlpNetwork MlpNetwork::glorot(std::size_t inputs, std::span<const std::size_t> hidden, Rng& rng) {
  std::vector<std::size_t> widths{inputs};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(widths[l] + widths[l + 1]));
    Layer layer{Matrix(widths[l + 1], widths[l]), std::vector<double>(widths[l + 1], 0.0)};
    for (std::size_t o = 0; o < widths[l + 1]; ++o) {
      for (std::size_t i = 0; i < widths[l]; ++i) layer.weights(o, i) = rng.uniform(-limit, limit);
    }
    layers.push_back(std::move(layer));
  }
  return MlpNetwork(std::move(layers));
}

double MlpNetwork::logit(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "network expects " + std::to_string(input_dim()) + " features, got " + std::to_string(x.size()));
  }
  std::vector<double> act(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    std::vector<double> next(layer.weights.rows());
    for (std::size_t o = 0; o < next.size(); ++o) {
      double z = layer.bias[o];
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < act.size(); ++i) z += w[i] * act[i];
      next[o] = l + 1 < layers_.size() ? std::max(0.0, z) : z;
    }
    act = std::move(next);
  }
  return act.front();
}

double MlpNetwork::probability(std::span<const double> x) const { return sigmoid(logit(x)); }

double MlpNetwork::loss(const Matrix& x, std::span<const int> y) const {
  if (x.rows() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double z = logit(x.row(r));
    total += softplus(z) - (y[r] == 1 ? z : 0.0);
  }
  return total / static_cast<double>(x.rows());
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.rows() * layer.weights.cols() + layer.bias.size();
  return n;
}

std::vector<double> MlpNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers_) {
    flat.insert(flat.end(), layer.weights.data().begin(), layer.weights.data().end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return flat;
}

void MlpNetwork::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "parameter vector size");
  std::size_t k = 0;
  for (auto& layer : layers_) {
    for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
      for (std::size_t i = 0; i < layer.weights.cols(); ++i) layer.weights(o, i) = flat[k++];
    }
    for (auto& b : layer.bias) b = flat[k++];
  }
}

std::vector<double> MlpNetwork::gradient(const Matrix& x, std::span<const int> y) const {
  std::vector<double> grad(parameter_count(), 0.0);
  if (x.rows() == 0) return grad;

  // offsets of each layer's block inside the flat vector
  std::vector<std::size_t> offset;
  std::size_t k = 0;
  for (const auto& layer : layers_) {
    offset.push_back(k);
    k += layer.weights.rows() * layer.weights.cols() + layer.bias.size();
  }

  const std::size_t n_layers = layers_.size();
  std::vector<std::vector<double>> acts(n_layers + 1);
  std::vector<std::vector<double>> pre(n_layers);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    acts[0].assign(x.row(r).begin(), x.row(r).end());
    for (std::size_t l = 0; l < n_layers; ++l) {
      const auto& layer = layers_[l];
      pre[l].assign(layer.weights.rows(), 0.0);
      acts[l + 1].assign(layer.weights.rows(), 0.0);
      for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
        double z = layer.bias[o];
        const auto w = layer.weights.row(o);
        for (std::size_t i = 0; i < acts[l].size(); ++i) z += w[i] * acts[l][i];
        pre[l][o] = z;
        acts[l + 1][o] = l + 1 < n_layers ? std::max(0.0, z) : z;
      }
    }

    // d(loss)/d(logit) for softplus(z) - y z
    std::vector<double> delta{sigmoid(pre.back().front()) - (y[r] == 1 ? 1.0 : 0.0)};
    for (std::size_t l = n_layers; l-- > 0;) {
      const auto& layer = layers_[l];
      const std::size_t in = layer.weights.cols();
      const std::size_t out = layer.weights.rows();
      for (std::size_t o = 0; o < out; ++o) {
        for (std::size_t i = 0; i < in; ++i) grad[offset[l] + o * in + i] += delta[o] * acts[l][i];
        grad[offset[l] + out * in + o] += delta[o];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        if (pre[l - 1][i] <= 0.0) continue;  // ReLU'(z) = 0 for z <= 0
        double s = 0.0;
        for (std::size_t o = 0; o < out; ++o) s += layer.weights(o, i) * delta[o];
        prev[i] = s;
      }
      delta = std::move(prev);
    }
  }
  for (auto& g : grad) g /= static_cast<double>(x.rows());
  return grad;
}

bool EarlyStopping::update(double monitored) {
  if (monitored < best_ - min_delta_) {
    best_ = monitored;
    wait_ = 0;
    return false;
  }
  ++wait_;
  return wait_ >= patience_;
}

double MlpModel::probability(std::span<const double> x) const {
  if (scaler) {
    if (x.size() != scaler->dim()) {
      throw Error(ErrorCode::DimensionMismatch, "network expects " + std::to_string(scaler->dim()) +
                                                    " features, got " + std::to_string(x.size()));
    }
    return network.probability(scaler->apply(x));
  }
  return network.probability(x);
}

MlpModel train_mlp(const Matrix& x_raw, std::span<const int> y, const Matrix& val_raw, std::span<const int> val_y,
                   const MlpParams& params, std::uint64_t seed) {
  if (x_raw.rows() == 0) throw Error(ErrorCode::EmptyData, "network needs training rows");
  if (x_raw.rows() != y.size() || val_raw.rows() != val_y.size()) {
    throw Error(ErrorCode::LengthMismatch, "network: rows and labels differ in length");
  }
  if (val_raw.rows() > 0 && val_raw.cols() != x_raw.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "validation rows have a different width");
  }
  if (params.batch_size == 0 || params.max_epochs == 0) {
    throw Error(ErrorCode::InvalidArgument, "batch size and epoch budget must be positive");
  }

  MlpModel model;
  Matrix x = x_raw;
  Matrix val_x = val_raw;
  if (params.standardize && x_raw.rows() >= 2) {
    model.scaler = fit_standardizer(x_raw);
    x = model.scaler->apply(x_raw);
    if (val_raw.rows() > 0) val_x = model.scaler->apply(val_raw);
  }

  Rng rng(seed);
  model.network = MlpNetwork::glorot(x.cols(), params.hidden, rng);
  auto theta = model.network.parameters();
  std::vector<double> m(theta.size(), 0.0);
  std::vector<double> v(theta.size(), 0.0);
  std::size_t step = 0;

  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  EarlyStopping stopper(params.min_delta, params.patience);

  for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const auto count = std::min(params.batch_size, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, count);
      const auto grad = model.network.gradient(x.select_rows(batch), select<int>(y, batch));

      ++step;
      const double t = static_cast<double>(step);
      const double lr_t = params.learning_rate * std::sqrt(1.0 - std::pow(params.beta2, t)) /
                          (1.0 - std::pow(params.beta1, t));
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = params.beta1 * m[i] + (1.0 - params.beta1) * grad[i];
        v[i] = params.beta2 * v[i] + (1.0 - params.beta2) * grad[i] * grad[i];
        theta[i] -= lr_t * m[i] / (std::sqrt(v[i]) + params.epsilon);
      }
      model.network.set_parameters(theta);
    }
    model.train_loss.push_back(model.network.loss(x, y));
    if (val_x.rows() == 0) continue;
    const double val_loss = model.network.loss(val_x, val_y);
    model.val_loss.push_back(val_loss);
    if (stopper.update(val_loss)) break;
  }
  return model;
}

}  // namespace hygiene
