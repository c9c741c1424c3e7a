#include "hygiene/signal.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hygiene/error.hpp"
#include "hygiene/text.hpp"

namespace hygiene {

HygieneClass class_from_code(int code) {
  if (code < 0 || code >= static_cast<int>(kNumClasses)) {
    throw Error(ErrorCode::InvalidArgument, "class code must be 0, 1 or 2, got " + std::to_string(code));
  }
  return static_cast<HygieneClass>(code);
}

std::string_view class_name(HygieneClass c) noexcept {
  switch (c) {
    case HygieneClass::KitchenSink: return "kitchen_sink";
    case HygieneClass::BathroomFaucet: return "bathroom_faucet";
    case HygieneClass::ToiletFlushing: return "toilet_flushing";
  }
  return "unknown";
}

std::string_view class_abbrev(HygieneClass c) noexcept {
  switch (c) {
    case HygieneClass::KitchenSink: return "KS";
    case HygieneClass::BathroomFaucet: return "BF";
    case HygieneClass::ToiletFlushing: return "TF";
  }
  return "??";
}

HygieneClass class_from_name(std::string_view name) {
  name = text::trim(name);
  for (const auto c : kAllClasses) {
    if (name == class_name(c) || name == class_abbrev(c)) return c;
  }
  if (const auto code = text::parse_int(name)) return class_from_code(static_cast<int>(*code));
  throw Error(ErrorCode::InvalidArgument, "unknown hygiene class '" + std::string(name) + "'");
}

void ExperimentLogEntry::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error(ErrorCode::InvalidArgument, "log entry " + event_id + ": duration_s must be > 0");
  }
  if (!(sensor_distance_m >= 0.0) || !std::isfinite(sensor_distance_m)) {
    throw Error(ErrorCode::InvalidArgument, "log entry " + event_id + ": sensor_distance_m must be >= 0");
  }
  if (!date.ok()) throw Error(ErrorCode::InvalidArgument, "log entry " + event_id + ": invalid date");
  if (start_time.count() < 0 || start_time.count() >= 86400) {
    throw Error(ErrorCode::InvalidArgument, "log entry " + event_id + ": start_time outside the day");
  }
}

EventRecording::EventRecording(std::string event_id, std::vector<double> samples, double sample_rate_hz,
                               std::optional<HygieneClass> label, std::optional<ExperimentLogEntry> meta)
    : event_id_(std::move(event_id)),
      samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      label_(label),
      meta_(std::move(meta)) {
  if (samples_.empty()) throw Error(ErrorCode::EmptyRecording, "recording " + event_id_ + " has no samples");
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw Error(ErrorCode::InvalidArgument, "recording " + event_id_ + ": sample rate must be positive");
  }
  const auto bad = std::find_if(samples_.begin(), samples_.end(), [](double v) { return !std::isfinite(v); });
  if (bad != samples_.end()) {
    throw Error(ErrorCode::NonFiniteSample, "recording " + event_id_ + ": sample " +
                                                std::to_string(bad - samples_.begin()) + " is not finite");
  }
  if (meta_) {
    meta_->validate();
    if (std::abs(duration_s() - meta_->duration_s) > kDurationToleranceS) {
      throw Error(ErrorCode::InvalidArgument, "recording " + event_id_ + " lasts " +
                                                  text::format_real(duration_s()) + " s but its log says " +
                                                  text::format_real(meta_->duration_s) + " s");
    }
  }
}

EventRecording EventRecording::with_samples(std::vector<double> samples) const {
  return EventRecording(event_id_, std::move(samples), sample_rate_hz_, label_, meta_);
}

EventRecording EventRecording::with_label(std::optional<HygieneClass> label) const {
  return EventRecording(event_id_, samples_, sample_rate_hz_, label, meta_);
}

EventRecording EventRecording::with_meta(std::optional<ExperimentLogEntry> meta) const {
  return EventRecording(event_id_, samples_, sample_rate_hz_, label_, std::move(meta));
}

namespace {

// absorbs representation error such as 0.29 * 100 = 28.999999999999996
std::size_t sample_index(double seconds, double fs) {
  return static_cast<std::size_t>(std::floor(seconds * fs + 1e-9));
}

}  // namespace

EventRecording segment(const EventRecording& rec, double start_s, double duration_s) {
  const double fs = rec.sample_rate_hz();
  if (!(start_s >= 0.0) || !(duration_s > 0.0) || !std::isfinite(start_s + duration_s) ||
      sample_index(start_s + duration_s, fs) > rec.size()) {
    throw Error(ErrorCode::OutOfRange, "segment [" + text::format_real(start_s) + ", +" +
                                           text::format_real(duration_s) + ") s exceeds recording " +
                                           rec.event_id() + " of " + text::format_real(rec.duration_s()) + " s");
  }
  const auto first = sample_index(start_s, fs);
  const auto last = sample_index(start_s + duration_s, fs);
  if (last <= first) throw Error(ErrorCode::OutOfRange, "segment of " + rec.event_id() + " is empty");

  std::vector<double> slice(rec.samples().begin() + static_cast<std::ptrdiff_t>(first),
                            rec.samples().begin() + static_cast<std::ptrdiff_t>(last));
  auto meta = rec.meta();
  const double sliced_duration = static_cast<double>(slice.size()) / fs;
  if (meta && std::abs(sliced_duration - meta->duration_s) > EventRecording::kDurationToleranceS) meta.reset();
  return EventRecording(rec.event_id(), std::move(slice), fs, rec.label(), std::move(meta));
}

std::string_view to_string(MatchStatus status) noexcept {
  switch (status) {
    case MatchStatus::Matched: return "matched";
    case MatchStatus::DurationMismatch: return "duration_mismatch";
    case MatchStatus::Missing: return "missing";
  }
  return "unknown";
}

ValidationReport validate_against_log(std::span<const EventRecording> recordings,
                                      std::span<const ExperimentLogEntry> log) {
  std::unordered_map<std::string_view, const EventRecording*> by_id;
  for (const auto& rec : recordings) by_id.emplace(rec.event_id(), &rec);

  ValidationReport report;
  std::unordered_map<std::string_view, bool> logged;
  for (const auto& entry : log) {
    logged[entry.event_id] = true;
    ValidationFinding finding{entry.event_id, MatchStatus::Missing, entry.duration_s, std::nullopt};
    if (const auto it = by_id.find(entry.event_id); it != by_id.end()) {
      finding.recorded_duration_s = it->second->duration_s();
      const double gap = std::abs(*finding.recorded_duration_s - entry.duration_s);
      finding.status =
          gap > EventRecording::kDurationToleranceS ? MatchStatus::DurationMismatch : MatchStatus::Matched;
    }
    switch (finding.status) {
      case MatchStatus::Matched: ++report.matched; break;
      case MatchStatus::DurationMismatch: ++report.mismatched; break;
      case MatchStatus::Missing: ++report.missing; break;
    }
    report.findings.push_back(std::move(finding));
  }
  for (const auto& rec : recordings) {
    if (!logged.contains(rec.event_id())) report.unlogged.push_back(rec.event_id());
  }
  return report;
}

}  // namespace hygiene
