#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hygiene/signal.hpp"

namespace hygiene {

/// Waveform parameters of one class. Every event is the sum of
///   - AR(1) flow noise (noise_std) under 0.5 s on/off ramps,
///   - a ringing burst at the start and at the end (transient_scale),
///   - amplitude * exp(-t / decay_s) * sin(2 pi f t + phase), where f is
///     alt_oscillation_hz for a share alt_fraction of the events and
///     oscillation_hz otherwise.
struct ClassSignature {
  double duration_min_s = 10.0;
  double duration_max_s = 20.0;
  double amplitude = 1.0;
  double noise_std = 1.0;
  double transient_scale = 1.0;
  double oscillation_hz = 5.0;
  double decay_s = 5.0;
  double alt_oscillation_hz = 5.0;
  double alt_fraction = 0.0;

  /// Throws InvalidConfig.
  void validate() const;
  friend bool operator==(const ClassSignature&, const ClassSignature&) = default;
};

ClassSignature default_signature(HygieneClass c) noexcept;

struct GeneratorConfig {
  std::size_t n_per_class = 30;
  std::uint64_t seed = 0;
  /// 1 keeps the class signatures, 0 collapses them onto their average.
  double separability = 1.0;
  /// Multiplies every amplitude.
  double intensity = 1.0;
  /// Multiplies the flow noise level.
  double noise_scale = 1.0;
  /// Each event is scaled by a factor drawn log-uniformly from
  /// [1 / intensity_spread, intensity_spread]; 1 disables the variation.
  double intensity_spread = 2.0;
  std::array<std::optional<ClassSignature>, kNumClasses> overrides{};

  /// Throws InvalidConfig.
  void validate() const;
  /// Signature after overrides and separability mixing.
  ClassSignature signature(HygieneClass c) const;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

/// "KS_0007" style identifier.
std::string synthetic_event_id(HygieneClass c, std::size_t event_index);

/// Deterministic in (cfg, class, event_index). The random stream depends on
/// (seed, event_index) only, so classes with equal signatures yield equal
/// waveforms.
EventRecording generate_event(HygieneClass c, const GeneratorConfig& cfg, std::size_t event_index);

struct SyntheticDataset {
  std::vector<EventRecording> recordings;  // class-major, labelled, with metadata
  std::vector<ExperimentLogEntry> log;
};

SyntheticDataset generate_dataset(const GeneratorConfig& cfg);

/// Layout: <dir>/recordings/<event_id>.csv, <dir>/experiment_log.csv and
/// <dir>/manifest.json (config, seed and signatures).
void write_dataset(const SyntheticDataset& data, const GeneratorConfig& cfg, const std::filesystem::path& dir);
std::string manifest_json(const GeneratorConfig& cfg, std::size_t n_events);

}  // namespace hygiene
