#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pce/linalg.hpp"

namespace pce {

/// Data matrix with one class label per column. Unlabeled matrices carry an
/// empty label vector.
struct LabeledDataset {
  Matrix matrix;
  std::vector<int> labels;
  std::map<std::string, std::string> meta;

  bool labeled() const { return !labels.empty(); }
  /// 1 + the largest label; 0 when unlabeled.
  int num_classes() const;
};

/// Throws ShapeError/ParseError unless labels match the columns and cover
/// every class id in 0..s-1.
void validate_labels(const LabeledDataset& ds);

enum class BasisRule { IndependentOrthogonal, RandomGaussian };

struct SubspaceBlock {
  Index dim = 1;
  Index count = 1;
};

struct SubspaceSpec {
  Index ambient = 1;
  std::vector<SubspaceBlock> subspaces;
  double coeff_scale = 1.0;
  BasisRule basis = BasisRule::IndependentOrthogonal;

  /// `classes` identical blocks of the given dimension and sample count.
  static SubspaceSpec uniform(Index ambient, Index classes, Index dim, Index count,
                              BasisRule basis = BasisRule::IndependentOrthogonal);
  Index total_dim() const;
  Index total_count() const;
};

/// Samples drawn from a union of linear subspaces, one class per subspace.
/// Throws InfeasibleSpec when the spec cannot be realized.
LabeledDataset generate_union_of_subspaces(const SubspaceSpec& spec, std::uint64_t seed);

enum class NoiseKind { Gaussian, Pixel };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  double rho = 0.1;
  std::optional<std::pair<double, double>> clip;
};

/// Adds rho * N(0, 1) to every entry, then clamps to `clip` when given.
Matrix add_gaussian_noise(const Eigen::Ref<const Matrix>& d, double rho,
                          std::optional<std::pair<double, double>> clip, std::uint64_t seed);

/// Replaces round-half-up(rho * m) distinct entries of each column with
/// uniform draws from [0, max of that column]. Columns whose max is not
/// positive are left unchanged.
Matrix add_pixel_corruption(const Eigen::Ref<const Matrix>& d, double rho, std::uint64_t seed);

Matrix apply_noise(const Eigen::Ref<const Matrix>& d, const NoiseSpec& noise, std::uint64_t seed);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<Index> train_columns;
  std::vector<Index> test_columns;
};

/// Stratified split: each class keeps round-half-up(fraction * n_c) samples
/// for training, clamped to [1, n_c - 1]. Both parts keep the original column
/// order. Throws TooFewSamples if a class has fewer than two samples.
TrainTestSplit split(const LabeledDataset& ds, double train_fraction, std::uint64_t seed);

/// Selects columns (and labels, when present) in the given order.
LabeledDataset select_columns(const LabeledDataset& ds, const std::vector<Index>& columns);

// Text formats. Floats are written in shortest round-trip form.
//
//   pce-dataset v1 m=<m> n=<n> classes=<s>
//   <n labels>
//   <m rows of n values>
//
//   pce-matrix v1 m=<m> n=<n>
//   <m rows of n values>
//
// Lines starting with '#' are comments; "# meta key=value" comments carry the
// provenance map.

/// Reads either format; labels are empty for pce-matrix files.
/// Errors: IoError, ParseError (with line and column), ShapeError on ragged rows.
LabeledDataset load_matrix(const std::filesystem::path& path);
LabeledDataset parse_matrix(const std::string& text);

/// Writes pce-dataset when labeled, pce-matrix otherwise. Atomic (temp + rename).
void save_matrix(const LabeledDataset& ds, const std::filesystem::path& path);
void save_matrix(const Eigen::Ref<const Matrix>& m, const std::filesystem::path& path);
std::string format_matrix(const LabeledDataset& ds);

}  // namespace pce
