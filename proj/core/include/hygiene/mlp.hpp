#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hygiene/features.hpp"
#include "hygiene/matrix.hpp"
#include "hygiene/rng.hpp"

namespace hygiene {

struct MlpParams {
  std::vector<std::size_t> hidden = {16, 8};
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  /// Early stopping on validation loss.
  double min_delta = 1e-3;
  std::size_t patience = 5;
  /// Share of the training rows held out for early stopping when the caller
  /// does not provide a validation set.
  double validation_fraction = 0.2;
  bool standardize = true;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Fully connected ReLU network with one sigmoid output unit.
class MlpNetwork {
 public:
  struct Layer {
    Matrix weights;  // out x in
    std::vector<double> bias;
    friend bool operator==(const Layer&, const Layer&) = default;
  };

  MlpNetwork() = default;
  explicit MlpNetwork(std::vector<Layer> layers);

  /// Glorot-uniform weights, zero biases.
  static MlpNetwork glorot(std::size_t inputs, std::span<const std::size_t> hidden, Rng& rng);

  std::size_t input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().weights.cols(); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  double logit(std::span<const double> x) const;
  double probability(std::span<const double> x) const;

  /// Mean binary cross-entropy over the rows.
  double loss(const Matrix& x, std::span<const int> y) const;
  /// Gradient of loss() with respect to parameters(), same ordering.
  std::vector<double> gradient(const Matrix& x, std::span<const int> y) const;

  /// Layer by layer: weights row-major, then biases.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);
  std::size_t parameter_count() const;

  friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;

 private:
  std::vector<Layer> layers_;
};

/// Stops once the monitored loss has failed to improve by more than
/// min_delta for `patience` consecutive epochs.
class EarlyStopping {
 public:
  EarlyStopping(double min_delta, std::size_t patience) : min_delta_(min_delta), patience_(patience) {}

  /// Records one epoch; true means training should stop now.
  bool update(double monitored);
  std::size_t wait() const noexcept { return wait_; }
  double best() const noexcept { return best_; }

 private:
  double min_delta_;
  std::size_t patience_;
  std::size_t wait_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

struct MlpModel {
  MlpNetwork network;
  std::optional<ScalerParams> scaler;
  std::vector<double> train_loss;  // per epoch, after the epoch's updates
  std::vector<double> val_loss;

  std::size_t input_dim() const noexcept { return network.input_dim(); }
  std::size_t epochs() const noexcept { return train_loss.size(); }
  double probability(std::span<const double> x) const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Adam on binary cross-entropy with mini-batches reshuffled every epoch.
/// Labels are 0/1; the validation rows drive early stopping only.
MlpModel train_mlp(const Matrix& x, std::span<const int> y, const Matrix& val_x, std::span<const int> val_y,
                   const MlpParams& params, std::uint64_t seed);

}  // namespace hygiene
