#include "pce/error.hpp"

namespace pce {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::NotSorted: return "NotSorted";
    case ErrorCode::DegenerateDimension: return "DegenerateDimension";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::BadDim: return "BadDim";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ShapeError:
    case ErrorCode::VersionMismatch:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace pce
