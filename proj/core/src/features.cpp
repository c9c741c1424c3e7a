#include "hygiene/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <string>

#include "hygiene/error.hpp"

namespace hygiene {

std::string_view feature_name(int index) {
  static constexpr std::array<std::string_view, kNumFeatures> names = {
      "Kurtosis", "Standard Deviation", "Entropy", "Highest Peak", "Lowest Peak",
      "Location of Highest Peak", "Location of Lowest Peak", "Peak Difference", "Mean", "Period"};
  if (index < 1 || index > static_cast<int>(kNumFeatures)) {
    throw Error(ErrorCode::InvalidArgument, "feature index must be in 1..10, got " + std::to_string(index));
  }
  return names[static_cast<std::size_t>(index - 1)];
}

void FeatureMatrix::validate() const {
  if (rows.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(rows.size()) + " feature rows but " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyData, "feature matrix has no rows");
}

Matrix FeatureMatrix::to_matrix() const {
  Matrix m(rows.size(), kNumFeatures);
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].values.begin(), rows[r].values.end(), m.row(r).begin());
  return m;
}

std::vector<int> FeatureMatrix::label_codes() const {
  std::vector<int> codes;
  codes.reserve(labels.size());
  for (const auto c : labels) codes.push_back(class_code(c));
  return codes;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (const auto i : indices) {
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

double kurtosis(std::span<const double> series) {
  if (series.size() < 2) throw Error(ErrorCode::TooShort, "kurtosis needs at least 2 samples");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) throw Error(ErrorCode::DegenerateSignal, "kurtosis of a constant series is undefined");

  const double n = static_cast<double>(series.size());
  double mean = 0.0;
  for (const double v : series) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const double v : series) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw Error(ErrorCode::DegenerateSignal, "series variance underflows");
  return m4 / (m2 * m2);
}

double shannon_entropy(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::TooShort, "entropy needs at least 1 sample");
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return 0.0;

  std::array<std::size_t, kEntropyBins> counts{};
  for (const double v : series) {
    auto bin = static_cast<std::size_t>((v - lo) / range * static_cast<double>(kEntropyBins));
    counts[std::min(bin, kEntropyBins - 1)]++;
  }
  const double n = static_cast<double>(series.size());
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

}  // namespace

double dominant_period(std::span<const double> series, double sample_rate_hz) {
  if (series.size() < 4) throw Error(ErrorCode::TooShort, "period needs at least 4 samples");
  const std::size_t n = series.size();
  const std::size_t bins = n / 2 + 1;

  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  // FFTW_ESTIMATE does not touch the buffers while planning
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  std::copy(series.begin(), series.end(), in.get());
  fftw_execute(plan.get());

  std::size_t best_bin = 0;
  double best_mag = 0.0;
  for (std::size_t k = 1; k < bins; ++k) {
    const double mag = std::hypot(out.get()[k][0], out.get()[k][1]);
    if (mag > best_mag) {
      best_mag = mag;
      best_bin = k;
    }
  }
  if (best_bin == 0 || best_mag < 1e-12 * static_cast<double>(n)) return 0.0;
  return static_cast<double>(n) / (static_cast<double>(best_bin) * sample_rate_hz);
}

FeatureVector extract_features(const EventRecording& rec) {
  const auto x = rec.samples();
  if (x.size() < 4) throw Error(ErrorCode::TooShort, "recording " + rec.event_id() + " has fewer than 4 samples");

  FeatureVector f;
  try {
    f[Feature::Kurtosis] = kurtosis(x);
  } catch (const Error& e) {
    throw Error(e.code(), "recording " + rec.event_id() + ": " + e.detail());
  }

  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= n;
  double m2 = 0.0;
  for (const double v : x) m2 += (v - mean) * (v - mean);
  m2 /= n;

  const auto hi = std::max_element(x.begin(), x.end());  // first occurrence
  const auto lo = std::min_element(x.begin(), x.end());
  const double last = n - 1.0;

  f[Feature::StdDev] = std::sqrt(m2);
  f[Feature::Entropy] = shannon_entropy(x);
  f[Feature::HighestPeak] = *hi;
  f[Feature::LowestPeak] = *lo;
  f[Feature::HighestPeakLocation] = static_cast<double>(hi - x.begin()) / last;
  f[Feature::LowestPeakLocation] = static_cast<double>(lo - x.begin()) / last;
  f[Feature::PeakDifference] = *hi - *lo;
  f[Feature::Mean] = mean;
  f[Feature::Period] = dominant_period(x, rec.sample_rate_hz());
  return f;
}

FeatureMatrix extract_feature_matrix(std::span<const EventRecording> recordings) {
  FeatureMatrix m;
  m.rows.reserve(recordings.size());
  m.labels.reserve(recordings.size());
  for (const auto& rec : recordings) {
    if (!rec.label()) throw Error(ErrorCode::InvalidArgument, "recording " + rec.event_id() + " has no label");
    m.rows.push_back(extract_features(rec));
    m.labels.push_back(*rec.label());
  }
  return m;
}

}  // namespace hygiene
