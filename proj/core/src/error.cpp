#include "hygiene/error.hpp"

namespace hygiene {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::EmptyRecording: return "EmptyRecording";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InsufficientClasses: return "InsufficientClasses";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedModel: return "MalformedModel";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

namespace {

std::string located(const std::string& file, std::size_t row, const std::string& detail) {
  std::string out = file;
  if (row > 0) out += ":" + std::to_string(row);
  out += ": " + detail;
  return out;
}

}  // namespace

ParseError::ParseError(ErrorCode code, std::string file, std::size_t row, const std::string& detail)
    : Error(code, located(file, row, detail)), file_(std::move(file)), row_(row) {}

}  // namespace hygiene
