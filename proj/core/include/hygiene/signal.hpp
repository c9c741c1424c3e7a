#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hygiene {

/// Hygiene event classes; the numeric codes are part of the file formats.
enum class HygieneClass : int { KitchenSink = 0, BathroomFaucet = 1, ToiletFlushing = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<HygieneClass, kNumClasses> kAllClasses = {
    HygieneClass::KitchenSink, HygieneClass::BathroomFaucet, HygieneClass::ToiletFlushing};

constexpr int class_code(HygieneClass c) noexcept { return static_cast<int>(c); }
HygieneClass class_from_code(int code);
/// "kitchen_sink", "bathroom_faucet", "toilet_flushing".
std::string_view class_name(HygieneClass c) noexcept;
/// "KS", "BF", "TF".
std::string_view class_abbrev(HygieneClass c) noexcept;
/// Accepts the long name, the abbreviation, or the numeric code.
HygieneClass class_from_name(std::string_view name);

inline constexpr double kSampleRateHz = 100.0;

/// One manually logged event (the eight logged columns plus a join key).
struct ExperimentLogEntry {
  std::string event_id;
  std::chrono::year_month_day date{};
  std::chrono::seconds start_time{0};  // since midnight
  double duration_s = 0.0;
  std::string building_type;
  std::string location;
  std::string position;
  std::string event_type;
  double sensor_distance_m = 0.0;

  void validate() const;

  friend bool operator==(const ExperimentLogEntry&, const ExperimentLogEntry&) = default;
};

/// A segmented event: uniformly sampled geophone velocity counts.
///
/// Immutable once built; the constructor enforces non-empty finite samples,
/// a positive rate and (when metadata is attached) a duration that agrees
/// with the logged one within kDurationToleranceS.
class EventRecording {
 public:
  static constexpr double kDurationToleranceS = 1.0;

  EventRecording(std::string event_id, std::vector<double> samples, double sample_rate_hz = kSampleRateHz,
                 std::optional<HygieneClass> label = std::nullopt,
                 std::optional<ExperimentLogEntry> meta = std::nullopt);

  const std::string& event_id() const noexcept { return event_id_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double duration_s() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_hz_; }
  const std::optional<HygieneClass>& label() const noexcept { return label_; }
  const std::optional<ExperimentLogEntry>& meta() const noexcept { return meta_; }

  /// Same identity, label and metadata; new sample values.
  EventRecording with_samples(std::vector<double> samples) const;
  EventRecording with_label(std::optional<HygieneClass> label) const;
  EventRecording with_meta(std::optional<ExperimentLogEntry> meta) const;

  friend bool operator==(const EventRecording&, const EventRecording&) = default;

 private:
  std::string event_id_;
  std::vector<double> samples_;
  double sample_rate_hz_;
  std::optional<HygieneClass> label_;
  std::optional<ExperimentLogEntry> meta_;
};

/// Slices [floor(start_s*fs), floor((start_s+duration_s)*fs)). Metadata is
/// kept only if its duration still matches the slice.
EventRecording segment(const EventRecording& rec, double start_s, double duration_s);

enum class MatchStatus { Matched, DurationMismatch, Missing };
std::string_view to_string(MatchStatus status) noexcept;

struct ValidationFinding {
  std::string event_id;
  MatchStatus status = MatchStatus::Missing;
  double logged_duration_s = 0.0;
  std::optional<double> recorded_duration_s;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;  // one per log entry, log order
  std::vector<std::string> unlogged;        // recordings with no log entry
  std::size_t matched = 0;
  std::size_t missing = 0;
  std::size_t mismatched = 0;
};

/// Joins log entries to recordings by event id and checks durations.
ValidationReport validate_against_log(std::span<const EventRecording> recordings,
                                      std::span<const ExperimentLogEntry> log);

// --- files -----------------------------------------------------------------

struct LoadOptions {
  double expected_rate_hz = kSampleRateHz;
  /// Accept files whose timestamp spacing implies a different rate.
  bool allow_rate_override = false;
};

/// Reads a `timestamp_ms,counts` file; the event id is the filename stem.
EventRecording load_recording(const std::filesystem::path& path, const LoadOptions& options = {});
void write_recording(const EventRecording& rec, const std::filesystem::path& path);

inline constexpr std::string_view kSamplesHeader = "timestamp_ms,counts";
inline constexpr std::string_view kLogHeader =
    "date,start_time,duration_s,building_type,location,position,event_type,sensor_distance_m,event_id";

std::vector<ExperimentLogEntry> load_experiment_log(const std::filesystem::path& path);

/// Loads every *.csv in `dir` (sorted by filename) and labels each recording
/// from the event_type of its log entry. Unlogged recordings stay unlabelled;
/// durations are not checked here (see validate_against_log).
std::vector<EventRecording> load_recording_set(const std::filesystem::path& dir,
                                               std::span<const ExperimentLogEntry> log,
                                               const LoadOptions& options = {});
void write_experiment_log(std::span<const ExperimentLogEntry> log, const std::filesystem::path& path);

std::string format_date(std::chrono::year_month_day date);
std::string format_time_of_day(std::chrono::seconds since_midnight);

}  // namespace hygiene
