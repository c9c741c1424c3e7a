#include "hygiene/filter.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/text.hpp"

namespace hygiene {

using cplx = std::complex<double>;

void BandSpec::validate(double sample_rate_hz) const {
  const double nyquist = sample_rate_hz / 2.0;
  if (!(std::isfinite(low_hz) && std::isfinite(high_hz) && low_hz > 0.0 && low_hz < high_hz &&
        high_hz < nyquist)) {
    throw Error(ErrorCode::InvalidBand, "band " + text::format_real(low_hz) + "-" + text::format_real(high_hz) +
                                            " Hz must satisfy 0 < low < high < " + text::format_real(nyquist));
  }
}

namespace {

cplx section_response(const Biquad& s, cplx z) {
  const cplx zi = 1.0 / z;
  const cplx zi2 = zi * zi;
  return (s.b0 + s.b1 * zi + s.b2 * zi2) / (1.0 + s.a1 * zi + s.a2 * zi2);
}

Biquad section_from_poles(cplx p1, cplx p2, double k2fs, cplx z_centre) {
  // bilinear map of the analog poles; zeros sit at z = 1 and z = -1
  const cplx z1 = (k2fs + p1) / (k2fs - p1);
  const cplx z2 = (k2fs + p2) / (k2fs - p2);
  Biquad s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  s.a1 = -(z1 + z2).real();
  s.a2 = (z1 * z2).real();
  const double gain = std::abs(section_response(s, z_centre));
  s.b0 /= gain;
  s.b2 /= gain;
  return s;
}

}  // namespace

BandpassFilter BandpassFilter::design(BandSpec band, double fs, int order) {
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  }
  band.validate(fs);
  if (order < 1 || order > 8) {
    throw Error(ErrorCode::InvalidBand, "filter order must be in 1..8, got " + std::to_string(order));
  }

  const double k = 2.0 * fs;
  const double w_low = k * std::tan(std::numbers::pi * band.low_hz / fs);
  const double w_high = k * std::tan(std::numbers::pi * band.high_hz / fs);
  const double bw = w_high - w_low;
  const double w0_sq = w_low * w_high;
  const double centre = 2.0 * std::atan(std::sqrt(w0_sq) / k);  // rad/sample
  const cplx z_centre = std::polar(1.0, centre);

  // s^2 - p*bw*s + w0^2 = 0 for every prototype pole p
  auto bp_roots = [&](cplx p) {
    const cplx disc = std::sqrt(p * p * bw * bw - 4.0 * w0_sq);
    return std::pair{(p * bw + disc) / 2.0, (p * bw - disc) / 2.0};
  };

  std::vector<Biquad> sections;
  for (int i = 0; i < order; ++i) {
    const double theta = std::numbers::pi * (2.0 * i + order + 1) / (2.0 * order);
    const cplx p = std::polar(1.0, theta);
    if (p.imag() > 1e-12) {
      const auto [s1, s2] = bp_roots(p);
      sections.push_back(section_from_poles(s1, std::conj(s1), k, z_centre));
      sections.push_back(section_from_poles(s2, std::conj(s2), k, z_centre));
    } else if (std::abs(p.imag()) <= 1e-12) {
      const auto [s1, s2] = bp_roots(cplx(-1.0, 0.0));
      sections.push_back(section_from_poles(s1, s2, k, z_centre));
    }
  }
  return BandpassFilter(std::move(sections), band, fs, order);
}

double BandpassFilter::magnitude(double freq_hz) const {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / sample_rate_hz_);
  cplx h = 1.0;
  for (const auto& s : sections_) h *= section_response(s, z);
  return std::abs(h);
}

std::vector<double> BandpassFilter::apply(std::span<const double> input) const {
  std::vector<double> signal(input.begin(), input.end());
  for (const auto& s : sections_) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (auto& v : signal) {
      const double x = v;
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      v = y;
    }
  }
  return signal;
}

EventRecording bandpass_filter(const EventRecording& rec, BandSpec band, int order) {
  const auto filter = BandpassFilter::design(band, rec.sample_rate_hz(), order);
  auto out = filter.apply(rec.samples());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      throw Error(ErrorCode::NonFiniteOutput,
                  "filter output of " + rec.event_id() + " is not finite at sample " + std::to_string(i));
    }
  }
  return rec.with_samples(std::move(out));
}

}  // namespace hygiene
