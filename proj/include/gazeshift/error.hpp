#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gazeshift {

/// Every failure the library reports. The CLI maps these onto exit codes.
enum class ErrorCode {
  // gaze_io
  EmptyLog,
  MalformedRow,
  InvalidMeta,
  // fixmap
  PointOutOfBounds,
  NoPoints,
  InvalidKernel,
  // simmetrics
  DimensionMismatch,
  DegenerateMap,
  AllPixelsPositive,
  InvalidArgument,
  // shift
  MetaMismatch,
  EmptyGrid,
  NoComparableFrames,
  TauNotInGrid,
  // stats
  LengthMismatch,
  AllZeroDifferences,
  TooFewPairs,
  NOutOfRange,
  // synth
  InvalidParams,
  LagTooLarge,
  // export / files
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed input row; carries the 1-based line number of the offending row.
class MalformedRowError : public Error {
 public:
  MalformedRowError(std::size_t line_no, const std::string& what)
      : Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace gazeshift
