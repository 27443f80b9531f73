#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pce/data.hpp"
#include "pce/graph.hpp"
#include "pce/linalg.hpp"
#include "pce/pce.hpp"

namespace pce {

/// 1-nearest-neighbor labels under Euclidean distance; ties go to the lowest
/// training index.
std::vector<int> nn_classify(const Eigen::Ref<const Matrix>& train_z,
                             std::span<const int> train_labels,
                             const Eigen::Ref<const Matrix>& test_z);

/// Fraction of positions where predicted equals truth.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Eigenfaces-style PCA: orthonormal top left singular vectors of the
/// column-centered data.
struct PcaModel {
  Vector mean;
  Matrix projection;  ///< m x dim, orthonormal columns
};

/// Throws BadDim unless 1 <= dim <= min(m, n - 1).
PcaModel pca_fit(const Eigen::Ref<const Matrix>& d, Index dim);
Matrix pca_transform(const PcaModel& model, const Eigen::Ref<const Matrix>& y);

enum class MethodKind { Pce, Pca, LleNpe, Raw };

/// Canonical names: "pce", "pca", "lle-npe", "raw".
std::string_view to_string(MethodKind kind);
std::optional<MethodKind> parse_method(std::string_view name);

struct MethodConfig {
  MethodKind kind = MethodKind::Pce;
  double lambda = kDefaultLambda;
  /// Output dimension for pca and lle-npe. Zero means: use the dimension that
  /// estimate_dimension picks for the training split at `lambda`.
  Index dim = 0;
  LleConfig lle;
  bool center = false;
};

enum class NoiseStage { BeforeSplit, AfterSplit };

struct ExperimentConfig {
  std::variant<std::filesystem::path, SubspaceSpec> source = SubspaceSpec{};
  std::optional<NoiseSpec> noise;
  NoiseStage noise_stage = NoiseStage::BeforeSplit;
  MethodConfig method;
  std::string classifier = "nn";
  Index trials = 10;
  double train_fraction = 0.5;
  std::uint64_t base_seed = 0;
};

struct TrialResult {
  Index trial = 0;
  double accuracy = 0.0;
  /// Feature dimension used (estimated k for pce).
  Index k = 0;
  double fit_seconds = 0.0;
  double transform_seconds = 0.0;
  double classify_seconds = 0.0;
};

struct Report {
  std::vector<TrialResult> trials;
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 for a single trial.
  double stddev = 0.0;

  /// Most frequent k; smallest on ties.
  Index k_mode() const;
};

/// Recomputes mean and stddev from the trial list.
void summarize(Report& report);

/// Repeated-trial protocol. Trial t uses seed base_seed + t, from which the
/// data, noise and split seeds are derived. A failing trial aborts the run
/// with an error naming its index.
Report run_experiment(const ExperimentConfig& cfg);

/// One row per trial (trial, accuracy, k, fit_s, transform_s, classify_s)
/// followed by a summary row.
std::string format_report_csv(const Report& report);

}  // namespace pce
