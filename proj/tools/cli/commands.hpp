#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pce/linalg.hpp"

namespace pce::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

/// Runs `pce <args...>`; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Synthetic matrix used by `pce bench`: a union of up to eight 8-dimensional
/// orthogonal subspaces plus 1e-3 Gaussian noise.
Matrix bench_matrix(Index m, Index n, std::uint64_t seed);

/// Parses "256x500,256x1000".
std::vector<std::pair<Index, Index>> parse_sizes(const std::string& text);

/// Parses "1,3,5" or "start:stop:step" (inclusive of stop when reached).
std::vector<double> parse_lambdas(const std::string& text);

}  // namespace pce::cli
