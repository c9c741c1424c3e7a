#pragma once

#include <span>
#include <vector>

#include "hygiene/signal.hpp"

namespace hygiene {

/// Pass band edges in Hz; valid when 0 < low < high < fs/2.
struct BandSpec {
  double low_hz = 1.0;
  double high_hz = 45.0;

  void validate(double sample_rate_hz) const;

  friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

inline constexpr BandSpec kDefaultBand{1.0, 45.0};
/// Low-pass prototype order; the band-pass has twice as many poles.
inline constexpr int kDefaultFilterOrder = 2;

/// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Butterworth band-pass realized as a cascade of biquads.
///
/// Design: analog Butterworth low-pass prototype of order N, low-pass to
/// band-pass substitution around the prewarped edges, bilinear transform.
/// Each section has zeros at DC and Nyquist and is scaled to unit gain at
/// the (digital) geometric centre frequency, so the cascade has unit gain
/// there and -3 dB at both band edges.
class BandpassFilter {
 public:
  static BandpassFilter design(BandSpec band, double sample_rate_hz, int order = kDefaultFilterOrder);

  std::span<const Biquad> sections() const noexcept { return sections_; }
  BandSpec band() const noexcept { return band_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  int order() const noexcept { return order_; }

  /// |H(e^{jw})| evaluated from the section coefficients.
  double magnitude(double freq_hz) const;

  /// Causal single forward pass, zero initial state (transposed direct form II).
  std::vector<double> apply(std::span<const double> input) const;

 private:
  BandpassFilter(std::vector<Biquad> sections, BandSpec band, double fs, int order)
      : sections_(std::move(sections)), band_(band), sample_rate_hz_(fs), order_(order) {}

  std::vector<Biquad> sections_;
  BandSpec band_;
  double sample_rate_hz_;
  int order_;
};

/// Filters a recording; throws InvalidBand or NonFiniteOutput.
EventRecording bandpass_filter(const EventRecording& rec, BandSpec band = kDefaultBand,
                               int order = kDefaultFilterOrder);

}  // namespace hygiene
