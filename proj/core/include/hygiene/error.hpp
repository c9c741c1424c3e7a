#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hygiene {

enum class ErrorCode {
  InvalidArgument,
  FileMissing,
  MalformedRow,
  NonFiniteSample,
  EmptyRecording,
  RateMismatch,
  InvalidBand,
  NonFiniteOutput,
  OutOfRange,
  DegenerateSignal,
  TooShort,
  TooFewRows,
  TooFewSamples,
  InsufficientClasses,
  NoConvergence,
  DimensionMismatch,
  EmptyData,
  LengthMismatch,
  EmptyMatrix,
  InvalidConfig,
  MalformedModel,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Raised while parsing a text file; remembers the offending file and the
/// 1-based line number (0 when the problem is not tied to one row).
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::string file, std::size_t row, const std::string& detail);

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string file_;
  std::size_t row_;
};

}  // namespace hygiene
