#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pce {

enum class ErrorCode {
  // Input, configuration and file-format problems.
  InvalidArgument,
  ParseError,
  ShapeError,
  VersionMismatch,
  IoError,
  // Numerical and domain failures.
  ZeroMatrix,
  NonFinite,
  NotSymmetric,
  NotConverged,
  DimensionMismatch,
  RankDeficient,
  EmptySpectrum,
  NotSorted,
  DegenerateDimension,
  BadK,
  BadDim,
  TooLarge,
  DegenerateNeighborhood,
  InfeasibleSpec,
  TooFewSamples,
  LengthMismatch,
  EmptyTrainingSet,
};

std::string_view to_string(ErrorCode code);

/// True for codes caused by malformed input files or configuration, as opposed
/// to numerical or domain failures. The command-line tool maps the two groups
/// onto exit codes 1 and 2.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pce
