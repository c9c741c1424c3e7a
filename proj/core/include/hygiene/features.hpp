#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "hygiene/matrix.hpp"
#include "hygiene/signal.hpp"

namespace hygiene {

/// Canonical 1-based feature indices; the labels/values files, selected
/// feature triples and reports all use this numbering.
enum class Feature : int {
  Kurtosis = 1,
  StdDev = 2,
  Entropy = 3,
  HighestPeak = 4,
  LowestPeak = 5,
  HighestPeakLocation = 6,
  LowestPeakLocation = 7,
  PeakDifference = 8,
  Mean = 9,
  Period = 10,
};

inline constexpr std::size_t kNumFeatures = 10;
inline constexpr std::size_t kEntropyBins = 32;

/// Display name for a 1-based feature index.
std::string_view feature_name(int index);

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double operator[](Feature f) const noexcept { return values[static_cast<std::size_t>(f) - 1]; }
  double& operator[](Feature f) noexcept { return values[static_cast<std::size_t>(f) - 1]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Rows of features with a parallel label list.
struct FeatureMatrix {
  std::vector<FeatureVector> rows;
  std::vector<HygieneClass> labels;

  std::size_t size() const noexcept { return rows.size(); }
  /// Throws LengthMismatch or EmptyData.
  void validate() const;
  Matrix to_matrix() const;
  std::vector<int> label_codes() const;
  FeatureMatrix subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Pearson (non-excess) kurtosis m4 / m2^2 from population moments.
double kurtosis(std::span<const double> series);

/// Entropy in bits of a kEntropyBins equal-width histogram over [min, max].
double shannon_entropy(std::span<const double> series);

/// 1/f of the strongest non-DC DFT bin (lowest bin on ties); 0 when every
/// non-DC magnitude is below 1e-12 * N.
double dominant_period(std::span<const double> series, double sample_rate_hz);

FeatureVector extract_features(const EventRecording& rec);

/// Extracts features for labelled recordings (every recording needs a label).
FeatureMatrix extract_feature_matrix(std::span<const EventRecording> recordings);

// --- standardization -----------------------------------------------------

/// Per-column z-score parameters. Zero-variance columns get std = 1 and are
/// flagged as degenerate.
struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> degenerate;

  std::size_t dim() const noexcept { return mean.size(); }
  std::vector<double> apply(std::span<const double> row) const;
  Matrix apply(const Matrix& m) const;
  Matrix unapply(const Matrix& m) const;

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

ScalerParams fit_standardizer(const Matrix& m);
ScalerParams fit_standardizer(const FeatureMatrix& m);
FeatureMatrix apply_standardizer(const ScalerParams& params, const FeatureMatrix& m);
FeatureMatrix unapply_standardizer(const ScalerParams& params, const FeatureMatrix& m);

// --- labels/values file pair ---------------------------------------------

/// Labels file: one class code per line. Values file: ten comma-separated
/// reals per line, same row order.
void write_feature_files(const FeatureMatrix& m, const std::filesystem::path& labels_path,
                         const std::filesystem::path& values_path);
FeatureMatrix read_feature_files(const std::filesystem::path& labels_path,
                                 const std::filesystem::path& values_path);

}  // namespace hygiene
