#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <fstream>
#include <sstream>

#include "hygiene/error.hpp"
#include "hygiene/signal.hpp"
#include "hygiene/text.hpp"

namespace hygiene {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ParseError(ErrorCode::FileMissing, path.string(), 0, "no such file");
  }
  std::ifstream in(path);
  if (!in) throw ParseError(ErrorCode::FileMissing, path.string(), 0, "cannot open for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
  return out;
}

void expect_header(std::istream& in, std::string_view header, const std::string& file) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != header) {
    throw ParseError(ErrorCode::MalformedRow, file, 1, "expected header '" + std::string(header) + "'");
  }
}

std::chrono::year_month_day parse_date(std::string_view s, const std::string& file, std::size_t row) {
  const auto parts = text::split(s, '-');
  if (parts.size() == 3) {
    const auto y = text::parse_int(parts[0]);
    const auto m = text::parse_int(parts[1]);
    const auto d = text::parse_int(parts[2]);
    if (y && m && d) {
      const std::chrono::year_month_day date{std::chrono::year(static_cast<int>(*y)),
                                              std::chrono::month(static_cast<unsigned>(*m)),
                                              std::chrono::day(static_cast<unsigned>(*d))};
      if (date.ok()) return date;
    }
  }
  throw ParseError(ErrorCode::MalformedRow, file, row, "date '" + std::string(s) + "' is not YYYY-MM-DD");
}

std::chrono::seconds parse_time(std::string_view s, const std::string& file, std::size_t row) {
  const auto parts = text::split(s, ':');
  if (parts.size() == 2 || parts.size() == 3) {
    const auto h = text::parse_int(parts[0]);
    const auto m = text::parse_int(parts[1]);
    const auto sec = parts.size() == 3 ? text::parse_int(parts[2]) : std::optional<long long>(0);
    if (h && m && sec && *h >= 0 && *h < 24 && *m >= 0 && *m < 60 && *sec >= 0 && *sec < 60) {
      return std::chrono::seconds(*h * 3600 + *m * 60 + *sec);
    }
  }
  throw ParseError(ErrorCode::MalformedRow, file, row, "start_time '" + std::string(s) + "' is not HH:MM[:SS]");
}

void check_field(std::string_view value, std::string_view name) {
  if (value.find_first_of(",\n\r") != std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " '" + std::string(value) +
                                                "' contains a comma or newline");
  }
}

}  // namespace

EventRecording load_recording(const std::filesystem::path& path, const LoadOptions& options) {
  const std::string file = path.string();
  auto in = open_input(path);
  expect_header(in, kSamplesHeader, file);

  std::vector<double> timestamps;
  std::vector<double> samples;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line);
    if (fields.size() != 2) {
      throw ParseError(ErrorCode::MalformedRow, file, row, "expected 2 fields, found " + std::to_string(fields.size()));
    }
    const auto t = text::parse_real(fields[0]);
    const auto v = text::parse_real(fields[1]);
    if (!t || !std::isfinite(*t)) throw ParseError(ErrorCode::MalformedRow, file, row, "bad timestamp");
    if (!v) throw ParseError(ErrorCode::MalformedRow, file, row, "bad sample value");
    if (!std::isfinite(*v)) throw ParseError(ErrorCode::NonFiniteSample, file, row, "sample is not finite");
    if (!timestamps.empty() && !(*t > timestamps.back())) {
      throw ParseError(ErrorCode::MalformedRow, file, row, "timestamps must increase");
    }
    timestamps.push_back(*t);
    samples.push_back(*v);
  }
  if (samples.empty()) throw ParseError(ErrorCode::EmptyRecording, file, 0, "no samples after the header");

  double rate = options.expected_rate_hz;
  if (timestamps.size() >= 2) {
    const double step = (timestamps.back() - timestamps.front()) / static_cast<double>(timestamps.size() - 1);
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (std::abs((timestamps[i] - timestamps[i - 1]) - step) > 1e-6 * std::max(1.0, step)) {
        throw ParseError(ErrorCode::MalformedRow, file, i + 2, "irregular timestamp spacing");
      }
    }
    const double implied = 1000.0 / step;
    if (std::abs(implied - options.expected_rate_hz) > 1e-6 * options.expected_rate_hz) {
      if (!options.allow_rate_override) {
        throw ParseError(ErrorCode::RateMismatch, file, 0,
                         "timestamps imply " + text::format_real(implied) + " Hz, expected " +
                             text::format_real(options.expected_rate_hz) + " Hz");
      }
      rate = implied;
    }
  }
  return EventRecording(path.stem().string(), std::move(samples), rate);
}

void write_recording(const EventRecording& rec, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << kSamplesHeader << '\n';
  const double step_ms = 1000.0 / rec.sample_rate_hz();
  const auto samples = rec.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << text::format_real(static_cast<double>(i) * step_ms) << ',' << text::format_real(samples[i]) << '\n';
  }
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing " + path.string());
}

std::vector<ExperimentLogEntry> load_experiment_log(const std::filesystem::path& path) {
  const std::string file = path.string();
  auto in = open_input(path);
  expect_header(in, kLogHeader, file);

  std::vector<ExperimentLogEntry> log;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(line);
    if (f.size() != 9) {
      throw ParseError(ErrorCode::MalformedRow, file, row, "expected 9 fields, found " + std::to_string(f.size()));
    }
    ExperimentLogEntry e;
    e.date = parse_date(f[0], file, row);
    e.start_time = parse_time(f[1], file, row);
    const auto duration = text::parse_real(f[2]);
    if (!duration) throw ParseError(ErrorCode::MalformedRow, file, row, "bad duration_s");
    e.duration_s = *duration;
    e.building_type = f[3];
    e.location = f[4];
    e.position = f[5];
    e.event_type = f[6];
    const auto distance = text::parse_real(f[7]);
    if (!distance) throw ParseError(ErrorCode::MalformedRow, file, row, "bad sensor_distance_m");
    e.sensor_distance_m = *distance;
    e.event_id = f[8];
    if (e.event_id.empty()) throw ParseError(ErrorCode::MalformedRow, file, row, "empty event_id");
    try {
      e.validate();
    } catch (const Error& err) {
      throw ParseError(ErrorCode::MalformedRow, file, row, err.what());
    }
    log.push_back(std::move(e));
  }
  return log;
}

void write_experiment_log(std::span<const ExperimentLogEntry> log, const std::filesystem::path& path) {
  for (const auto& e : log) {
    e.validate();
    check_field(e.event_id, "event_id");
    check_field(e.building_type, "building_type");
    check_field(e.location, "location");
    check_field(e.position, "position");
    check_field(e.event_type, "event_type");
  }
  auto out = open_output(path);
  out << kLogHeader << '\n';
  for (const auto& e : log) {
    out << format_date(e.date) << ',' << format_time_of_day(e.start_time) << ','
        << text::format_real(e.duration_s) << ',' << e.building_type << ',' << e.location << ',' << e.position
        << ',' << e.event_type << ',' << text::format_real(e.sensor_distance_m) << ',' << e.event_id << '\n';
  }
}

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string format_time_of_day(std::chrono::seconds since_midnight) {
  const auto total = since_midnight.count();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(total / 3600),
                static_cast<long long>((total / 60) % 60), static_cast<long long>(total % 60));
  return buf;
}

std::vector<EventRecording> load_recording_set(const std::filesystem::path& dir,
                                               std::span<const ExperimentLogEntry> log, const LoadOptions& options) {
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError(ErrorCode::FileMissing, dir.string(), 0, "recording directory not found");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, const ExperimentLogEntry*> by_id;
  for (const auto& e : log) by_id.emplace(e.event_id, &e);

  std::vector<EventRecording> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    auto rec = load_recording(f, options);
    const auto it = by_id.find(rec.event_id());
    if (it != by_id.end()) rec = rec.with_label(class_from_name(it->second->event_type));
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace hygiene
