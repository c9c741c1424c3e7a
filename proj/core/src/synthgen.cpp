#include "hygiene/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>

#include "hygiene/error.hpp"
#include "hygiene/rng.hpp"

namespace hygiene {

namespace {

constexpr double kRampS = 0.5;
constexpr double kNoiseRho = 0.5;
constexpr double kBurstHz = 12.0;
constexpr double kBurstDecayS = 0.15;
constexpr double kAmplitudeJitter = 0.2;
constexpr double kFrequencyJitter = 0.05;

double jitter(Rng& rng, double spread) { return 1.0 + spread * (2.0 * rng.uniform01() - 1.0); }

double burst(double dt, double scale) {
  if (dt < 0.0) return 0.0;
  return scale * std::exp(-dt / kBurstDecayS) * std::sin(2.0 * std::numbers::pi * kBurstHz * dt);
}

nlohmann::json signature_json(const ClassSignature& s) {
  return {{"duration_min_s", s.duration_min_s}, {"duration_max_s", s.duration_max_s},
          {"amplitude", s.amplitude},           {"noise_std", s.noise_std},
          {"transient_scale", s.transient_scale}, {"oscillation_hz", s.oscillation_hz},
          {"decay_s", s.decay_s},
          {"alt_oscillation_hz", s.alt_oscillation_hz},
          {"alt_fraction", s.alt_fraction}};
}

}  // namespace

void ClassSignature::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be positive");
    }
  };
  positive(duration_min_s, "duration_min_s");
  positive(duration_max_s, "duration_max_s");
  positive(amplitude, "amplitude");
  positive(noise_std, "noise_std");
  positive(transient_scale, "transient_scale");
  positive(oscillation_hz, "oscillation_hz");
  positive(decay_s, "decay_s");
  if (duration_max_s < duration_min_s) throw Error(ErrorCode::InvalidConfig, "duration range is reversed");
  if (duration_min_s < 2.0 * kRampS) throw Error(ErrorCode::InvalidConfig, "events must last at least 1 s");
  positive(alt_oscillation_hz, "alt_oscillation_hz");
  if (oscillation_hz >= kSampleRateHz / 2.0 || alt_oscillation_hz >= kSampleRateHz / 2.0) {
    throw Error(ErrorCode::InvalidConfig, "oscillation above Nyquist");
  }
  if (!(alt_fraction >= 0.0 && alt_fraction <= 1.0)) throw Error(ErrorCode::InvalidConfig, "alt_fraction outside [0, 1]");
}

ClassSignature default_signature(HygieneClass c) noexcept {
  switch (c) {
    case HygieneClass::KitchenSink:
      return {10.0, 25.0, 0.5, 1.0, 0.8, 6.0, 1000.0, 6.0, 0.0};
    case HygieneClass::BathroomFaucet:
      return {6.0, 15.0, 0.3, 1.2, 26.0, 6.0, 5.0, 6.0, 0.0};
    case HygieneClass::ToiletFlushing:
      return {30.0, 50.0, 1.0, 1.1, 1.0, 1.5, 20.0, 9.0, 0.3};
  }
  return {};
}

void GeneratorConfig::validate() const {
  if (n_per_class == 0) throw Error(ErrorCode::InvalidConfig, "n_per_class must be at least 1");
  if (!(separability >= 0.0 && separability <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "separability must lie in [0, 1]");
  }
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw Error(ErrorCode::InvalidConfig, "intensity must be positive");
  if (!(intensity_spread >= 1.0) || !std::isfinite(intensity_spread)) {
    throw Error(ErrorCode::InvalidConfig, "intensity_spread must be at least 1");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw Error(ErrorCode::InvalidConfig, "noise_scale must be non-negative");
  }
  for (const auto c : kAllClasses) signature(c).validate();
}

ClassSignature GeneratorConfig::signature(HygieneClass c) const {
  std::array<ClassSignature, kNumClasses> own;
  for (const auto k : kAllClasses) {
    const auto i = static_cast<std::size_t>(class_code(k));
    own[i] = overrides[i] ? *overrides[i] : default_signature(k);
  }
  auto mix = [&](double ClassSignature::*field) {
    double neutral = 0.0;
    for (const auto& s : own) neutral += s.*field;
    neutral /= static_cast<double>(kNumClasses);
    return neutral + separability * (own[static_cast<std::size_t>(class_code(c))].*field - neutral);
  };
  ClassSignature s;
  s.duration_min_s = mix(&ClassSignature::duration_min_s);
  s.duration_max_s = mix(&ClassSignature::duration_max_s);
  s.amplitude = mix(&ClassSignature::amplitude);
  s.noise_std = mix(&ClassSignature::noise_std);
  s.transient_scale = mix(&ClassSignature::transient_scale);
  s.oscillation_hz = mix(&ClassSignature::oscillation_hz);
  s.decay_s = mix(&ClassSignature::decay_s);
  s.alt_oscillation_hz = mix(&ClassSignature::alt_oscillation_hz);
  s.alt_fraction = mix(&ClassSignature::alt_fraction);
  return s;
}

std::string synthetic_event_id(HygieneClass c, std::size_t event_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu", event_index);
  return std::string(class_abbrev(c)) + buf;
}

EventRecording generate_event(HygieneClass c, const GeneratorConfig& cfg, std::size_t event_index) {
  cfg.validate();
  const auto sig = cfg.signature(c);
  Rng rng(derive_seed(cfg.seed, {event_index}));

  const double duration = sig.duration_min_s + rng.uniform01() * (sig.duration_max_s - sig.duration_min_s);
  const double gain = cfg.intensity * std::exp(std::log(cfg.intensity_spread) * (2.0 * rng.uniform01() - 1.0));
  const double amp = sig.amplitude * jitter(rng, kAmplitudeJitter) * gain;
  const bool alt_mode = rng.uniform01() < sig.alt_fraction;
  const double freq = (alt_mode ? sig.alt_oscillation_hz : sig.oscillation_hz) * jitter(rng, kFrequencyJitter);
  const double phase = 2.0 * std::numbers::pi * rng.uniform01();
  const double open_burst = sig.transient_scale * jitter(rng, kAmplitudeJitter) * gain;
  const double close_burst = sig.transient_scale * jitter(rng, kAmplitudeJitter) * gain;
  const double noise = sig.noise_std * cfg.noise_scale * gain;

  const auto n = static_cast<std::size_t>(std::floor(duration * kSampleRateHz));
  const double length_s = static_cast<double>(n) / kSampleRateHz;
  const double close_at = std::max(0.0, length_s - 2.0 * kRampS);
  const double innovation = std::sqrt(1.0 - kNoiseRho * kNoiseRho);

  std::vector<double> x(n);
  double ar = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    if (i > 0) ar = kNoiseRho * ar + innovation * rng.normal();
    const double ramp = std::clamp(std::min(t, length_s - t) / kRampS, 0.0, 1.0);
    x[i] = noise * ramp * ar + burst(t, open_burst) + burst(t - close_at, close_burst) +
           amp * std::exp(-t / sig.decay_s) * std::sin(2.0 * std::numbers::pi * freq * t + phase);
  }
  return EventRecording(synthetic_event_id(c, event_index), std::move(x), kSampleRateHz, c);
}

SyntheticDataset generate_dataset(const GeneratorConfig& cfg) {
  cfg.validate();
  SyntheticDataset data;
  const std::chrono::sys_days first_day{std::chrono::year{2022} / std::chrono::March / 1};
  std::size_t g = 0;
  for (const auto c : kAllClasses) {
    for (std::size_t i = 0; i < cfg.n_per_class; ++i, ++g) {
      auto rec = generate_event(c, cfg, i);
      ExperimentLogEntry e;
      e.event_id = rec.event_id();
      e.date = std::chrono::year_month_day{first_day + std::chrono::days{static_cast<int>(g / 12)}};
      e.start_time = std::chrono::hours{8} + std::chrono::minutes{45 * static_cast<int>(g % 12)};
      e.duration_s = rec.duration_s();
      e.building_type = "residential";
      switch (c) {
        case HygieneClass::KitchenSink:
          e.location = "kitchen";
          e.position = "sink_cabinet";
          e.sensor_distance_m = 0.5;
          break;
        case HygieneClass::BathroomFaucet:
          e.location = "bathroom";
          e.position = "faucet";
          e.sensor_distance_m = 0.0;
          break;
        case HygieneClass::ToiletFlushing:
          e.location = "bathroom";
          e.position = "toilet_tank";
          e.sensor_distance_m = 0.3;
          break;
      }
      e.event_type = std::string(class_name(c));
      data.log.push_back(e);
      data.recordings.push_back(rec.with_meta(e));
    }
  }
  return data;
}

std::string manifest_json(const GeneratorConfig& cfg, std::size_t n_events) {
  nlohmann::json sigs = nlohmann::json::object();
  for (const auto c : kAllClasses) sigs[std::string(class_name(c))] = signature_json(cfg.signature(c));
  const nlohmann::json j{{"generator", "hygiene-synth"},
                         {"version", 1},
                         {"seed", cfg.seed},
                         {"n_per_class", cfg.n_per_class},
                         {"separability", cfg.separability},
                         {"intensity", cfg.intensity},
                         {"noise_scale", cfg.noise_scale},
                         {"intensity_spread", cfg.intensity_spread},
                         {"sample_rate_hz", kSampleRateHz},
                         {"n_events", n_events},
                         {"signatures", sigs}};
  return j.dump(2) + "\n";
}

void write_dataset(const SyntheticDataset& data, const GeneratorConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "recordings");
  for (const auto& rec : data.recordings) write_recording(rec, dir / "recordings" / (rec.event_id() + ".csv"));
  write_experiment_log(data.log, dir / "experiment_log.csv");
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::FileMissing, "cannot write " + (dir / "manifest.json").string());
  out << manifest_json(cfg, data.recordings.size());
}

}  // namespace hygiene
