#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "fixtures.hpp"
#include "hygiene/error.hpp"
#include "hygiene/filter.hpp"
#include "hygiene/signal.hpp"
#include "oracles.hpp"

namespace hygiene {
namespace {

using testing::TempDir;

ExperimentLogEntry log_entry(const std::string& id, double duration) {
  ExperimentLogEntry e;
  e.event_id = id;
  e.date = std::chrono::year_month_day{std::chrono::year{2022}, std::chrono::month{3}, std::chrono::day{1}};
  e.start_time = std::chrono::hours{8};
  e.duration_s = duration;
  e.building_type = "residential";
  e.location = "kitchen";
  e.position = "sink_cabinet";
  e.event_type = "kitchen_sink";
  e.sensor_distance_m = 0.5;
  return e;
}

void write_lines(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

TEST(EventRecording, RejectsEmptyAndNonFinite) {
  EXPECT_EQ(code_of([] { EventRecording("e", {}); }), ErrorCode::EmptyRecording);
  EXPECT_EQ(code_of([] { EventRecording("e", {1.0, std::nan("")}); }), ErrorCode::NonFiniteSample);
  EXPECT_EQ(code_of([] { EventRecording("e", {1.0, INFINITY}); }), ErrorCode::NonFiniteSample);
  EXPECT_EQ(code_of([] { EventRecording("e", {1.0}, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(EventRecording, MetadataDurationMustAgree) {
  std::vector<double> s(5000, 1.0);
  EXPECT_NO_THROW(EventRecording("e", s, 100.0, std::nullopt, log_entry("e", 50.5)));
  EXPECT_ANY_THROW(EventRecording("e", s, 100.0, std::nullopt, log_entry("e", 52.0)));
}

TEST(ClassCodes, FixedNumbering) {
  EXPECT_EQ(class_code(HygieneClass::KitchenSink), 0);
  EXPECT_EQ(class_code(HygieneClass::BathroomFaucet), 1);
  EXPECT_EQ(class_code(HygieneClass::ToiletFlushing), 2);
  EXPECT_EQ(class_from_name("KS"), HygieneClass::KitchenSink);
  EXPECT_EQ(class_from_name("bathroom_faucet"), HygieneClass::BathroomFaucet);
  EXPECT_EQ(class_from_name("2"), HygieneClass::ToiletFlushing);
  EXPECT_ANY_THROW(class_from_name("shower"));
  EXPECT_ANY_THROW(class_from_code(3));
}

TEST(LoadRecording, ParsesThreeRows) {
  TempDir dir("load");
  write_lines(dir / "ev1.csv", "timestamp_ms,counts\n0,0.0\n10,1.5\n20,-1.5\n");
  const auto rec = load_recording(dir / "ev1.csv");
  EXPECT_EQ(rec.event_id(), "ev1");
  ASSERT_EQ(rec.size(), 3u);
  EXPECT_EQ(rec.samples()[0], 0.0);
  EXPECT_EQ(rec.samples()[1], 1.5);
  EXPECT_EQ(rec.samples()[2], -1.5);
  EXPECT_EQ(rec.sample_rate_hz(), 100.0);
}

TEST(LoadRecording, Errors) {
  TempDir dir("load_err");
  write_lines(dir / "empty.csv", "timestamp_ms,counts\n");
  write_lines(dir / "bad.csv", "timestamp_ms,counts\n0,1\n10,abc\n");
  write_lines(dir / "nan.csv", "timestamp_ms,counts\n0,1\n10,nan\n");
  write_lines(dir / "rate.csv", "timestamp_ms,counts\n0,1\n20,2\n40,3\n");
  EXPECT_EQ(code_of([&] { load_recording(dir / "missing.csv"); }), ErrorCode::FileMissing);
  EXPECT_EQ(code_of([&] { load_recording(dir / "empty.csv"); }), ErrorCode::EmptyRecording);
  try {
    load_recording(dir / "bad.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRow);
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("bad.csv"), std::string::npos);
  }
  EXPECT_EQ(code_of([&] { load_recording(dir / "nan.csv"); }), ErrorCode::NonFiniteSample);
  EXPECT_EQ(code_of([&] { load_recording(dir / "rate.csv"); }), ErrorCode::RateMismatch);
  LoadOptions lenient;
  lenient.allow_rate_override = true;
  EXPECT_EQ(load_recording(dir / "rate.csv", lenient).sample_rate_hz(), 50.0);
}

TEST(LoadRecording, RoundTripIsBitExact) {
  TempDir dir("roundtrip");
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    auto rec = testing::random_recording(rng, 1, 400, "r" + std::to_string(i));
    const auto path = dir / (rec.event_id() + ".csv");
    write_recording(rec, path);
    const auto back = load_recording(path);
    ASSERT_EQ(back.size(), rec.size());
    for (std::size_t k = 0; k < rec.size(); ++k) ASSERT_EQ(back.samples()[k], rec.samples()[k]);
  }
}

TEST(Segment, IndexArithmetic) {
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i) * 0.5;
  const EventRecording rec("ten", s);
  const auto part = segment(rec, 2.0, 1.0);
  ASSERT_EQ(part.size(), 100u);
  EXPECT_EQ(part.samples()[0], s[200]);
  EXPECT_EQ(part.samples()[99], s[299]);
  EXPECT_EQ(segment(rec, 0.0, rec.duration_s()), rec);
  EXPECT_EQ(segment(part, 0.0, 1.0), part);
  EXPECT_EQ(code_of([&] { segment(rec, 9.5, 1.0); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { segment(rec, -1.0, 1.0); }), ErrorCode::OutOfRange);
}

TEST(ValidateAgainstLog, EmptyInputs) {
  const auto r = validate_against_log({}, {});
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.matched + r.missing + r.mismatched, 0u);
}

TEST(ValidateAgainstLog, MatchMismatchMissing) {
  const std::vector<EventRecording> recs = {EventRecording("a", std::vector<double>(5000, 1.0)),
                                            EventRecording("b", std::vector<double>(1000, 1.0)),
                                            EventRecording("z", std::vector<double>(10, 1.0))};
  const std::vector<ExperimentLogEntry> log = {log_entry("a", 50.0), log_entry("b", 20.0), log_entry("c", 5.0)};
  const auto r = validate_against_log(recs, log);
  EXPECT_EQ(r.matched, 1u);
  EXPECT_EQ(r.mismatched, 1u);
  EXPECT_EQ(r.missing, 1u);
  ASSERT_EQ(r.findings.size(), 3u);
  EXPECT_EQ(r.findings[0].status, MatchStatus::Matched);
  EXPECT_EQ(r.findings[1].status, MatchStatus::DurationMismatch);
  EXPECT_EQ(r.findings[2].status, MatchStatus::Missing);
  EXPECT_EQ(r.unlogged, std::vector<std::string>{"z"});
}

TEST(ValidateAgainstLog, EightMissingOutOf368) {
  std::vector<ExperimentLogEntry> log;
  std::vector<EventRecording> recs;
  for (int i = 0; i < 368; ++i) {
    const std::string id = "ev" + std::to_string(i);
    log.push_back(log_entry(id, 10.0));
    if (i % 46 != 0) recs.emplace_back(id, std::vector<double>(1000, 0.25));
  }
  ASSERT_EQ(recs.size(), 360u);
  const auto r = validate_against_log(recs, log);
  EXPECT_EQ(r.missing, 8u);
  EXPECT_EQ(r.matched, 360u);
}

TEST(ExperimentLog, RoundTrip) {
  TempDir dir("log");
  std::vector<ExperimentLogEntry> log = {log_entry("a", 12.25), log_entry("b", 30.0)};
  log[1].start_time = std::chrono::seconds{13 * 3600 + 5 * 60 + 7};
  write_experiment_log(log, dir / "log.csv");
  EXPECT_EQ(load_experiment_log(dir / "log.csv"), log);
}

// --- filter ---------------------------------------------------------------

TEST(BandSpec, Validation) {
  EXPECT_NO_THROW((BandSpec{1.0, 45.0}.validate(100.0)));
  EXPECT_THROW((BandSpec{0.0, 45.0}.validate(100.0)), Error);
  EXPECT_THROW((BandSpec{10.0, 5.0}.validate(100.0)), Error);
  EXPECT_THROW((BandSpec{1.0, 50.0}.validate(100.0)), Error);
  const EventRecording rec("r", std::vector<double>(10, 1.0));
  EXPECT_EQ(code_of([&] { bandpass_filter(rec, BandSpec{1.0, 60.0}); }), ErrorCode::InvalidBand);
}

TEST(Filter, ZeroInZeroOut) {
  const EventRecording rec("z", std::vector<double>(1000, 0.0));
  const auto out = bandpass_filter(rec);
  ASSERT_EQ(out.size(), 1000u);
  for (const double v : out.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Filter, MagnitudeMatchesAnalyticButterworth) {
  for (const int order : {1, 2, 3}) {
    const auto f = BandpassFilter::design(kDefaultBand, 100.0, order);
    EXPECT_EQ(f.sections().size(), static_cast<std::size_t>(order));
    for (double hz = 0.05; hz < 50.0; hz *= 1.15) {
      const double expected = testing::butterworth_bandpass_gain(hz, 1.0, 45.0, 100.0, order);
      EXPECT_NEAR(f.magnitude(hz), expected, 1e-9 + 1e-9 * expected) << "order " << order << " at " << hz;
    }
  }
}

TEST(Filter, BandEdgesAreHalfPower) {
  const auto f = BandpassFilter::design(BandSpec{2.0, 30.0}, 100.0);
  EXPECT_NEAR(f.magnitude(2.0), std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(f.magnitude(30.0), std::sqrt(0.5), 1e-9);
}

TEST(Filter, SteadyStateSineResponse) {
  const auto f = BandpassFilter::design(kDefaultBand, 100.0);
  auto gain = [&](double hz) {
    std::vector<double> x(60000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * std::numbers::pi * hz * static_cast<double>(i) / 100.0);
    return testing::steady_state_amplitude(f.apply(x), hz, 100.0, 200.0);
  };
  EXPECT_NEAR(20 * std::log10(gain(20.0)), 0.0, 3.0);
  EXPECT_LE(gain(0.1), 0.1);
  EXPECT_LE(gain(49.0), 0.1);
}

TEST(Filter, ConstantInputDecays) {
  const auto f = BandpassFilter::design(kDefaultBand, 100.0);
  const auto y = f.apply(std::vector<double>(5000, 3.0));
  EXPECT_LE(std::abs(y.back()), 0.3);
}

TEST(Filter, Linearity) {
  Rng rng(5);
  const auto f = BandpassFilter::design(kDefaultBand, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 500;
    std::vector<double> x(n), y(n), mix(n);
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
      mix[i] = a * x[i] + b * y[i];
    }
    const auto fx = f.apply(x), fy = f.apply(y), fm = f.apply(mix);
    double scale = 0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(fm[i]));
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(fm[i], a * fx[i] + b * fy[i], 1e-9 * scale);
  }
}

TEST(Filter, CausalAndTimeInvariant) {
  const auto f = BandpassFilter::design(kDefaultBand, 100.0);
  std::vector<double> impulse(300, 0.0), delayed(300, 0.0);
  impulse[0] = 1.0;
  delayed[40] = 1.0;
  const auto h = f.apply(impulse), hd = f.apply(delayed);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(hd[i], 0.0);
  for (std::size_t i = 40; i < 300; ++i) EXPECT_NEAR(hd[i], h[i - 40], 1e-15);
}

TEST(Filter, KeepsIdentityAndLength) {
  const EventRecording rec("keep", std::vector<double>{1, 2, 3, 4, 5}, 100.0, HygieneClass::BathroomFaucet);
  const auto out = bandpass_filter(rec);
  EXPECT_EQ(out.event_id(), "keep");
  EXPECT_EQ(out.size(), 5u);
  EXPECT_EQ(out.label(), HygieneClass::BathroomFaucet);
}

}  // namespace
}  // namespace hygiene
