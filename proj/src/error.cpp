#include "gazeshift/error.hpp"

namespace gazeshift {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvalidMeta: return "InvalidMeta";
    case ErrorCode::PointOutOfBounds: return "PointOutOfBounds";
    case ErrorCode::NoPoints: return "NoPoints";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::AllPixelsPositive: return "AllPixelsPositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MetaMismatch: return "MetaMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NoComparableFrames: return "NoComparableFrames";
    case ErrorCode::TauNotInGrid: return "TauNotInGrid";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::NOutOfRange: return "NOutOfRange";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace gazeshift
