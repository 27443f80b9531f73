#pragma once

#include <cstddef>
#include <span>

#include "pce/linalg.hpp"

namespace pce {

/// Default trade-off between model size and discarded energy.
inline constexpr double kDefaultLambda = 1.0;

/// Absolute tolerance under which two candidate dimensions tie; the smaller wins.
inline constexpr double kDimensionTieTolerance = 1e-12;

/// Largest n for which the n x n affinity may be materialized by default.
inline constexpr Index kDefaultAffinityCap = 20000;

/// Feature dimension minimizing r + lambda * sum_{i > r} sigma_i^2 over
/// r = 0..sigma.size(). Equivalent to counting lambda * sigma_i^2 > 1 away from
/// exact ties.
///
/// Errors: EmptySpectrum, NotSorted (sigma increases by more than 1e-12),
/// InvalidArgument (lambda not positive, negative or non-finite sigma).
Index estimate_dimension(std::span<const double> sigma, double lambda);
Index estimate_dimension(const Vector& sigma, double lambda);

/// Factored principal coefficients C = vk * vk^T; vk holds the leading k right
/// singular vectors of the training matrix.
struct CoefficientFactor {
  Matrix vk;
  Index k = 0;

  Index samples() const { return vk.rows(); }
};

/// Throws DegenerateDimension when lambda is too small for any direction to be
/// kept; the message carries the smallest workable lambda.
CoefficientFactor principal_coefficients(const SvdFactors& svd, double lambda);

/// Materialized n x n affinity vk * vk^T. Throws TooLarge past `cap` samples.
Matrix materialize_affinity(const CoefficientFactor& factor, Index cap = kDefaultAffinityCap);

struct CleanSplit {
  Matrix clean;  ///< rank-k truncation, D0
  Matrix error;  ///< remaining singular triplets, E = D - D0
};

/// Splits the factored matrix into its leading k triplets and the rest.
/// Throws BadK unless 1 <= k <= svd.rank.
CleanSplit recover_clean(const SvdFactors& svd, Index k);

struct FitOptions {
  /// Subtract the column mean before the SVD. Off by default.
  bool center = false;
  /// Metric ridge handed to the generalized eigensolver.
  double ridge = 0.0;
};

/// Fitted projection. Immutable once built.
struct PceModel {
  double lambda = kDefaultLambda;
  Index k = 0;
  /// m x k projection; theta^T (D D^T) theta = I on the training matrix.
  Matrix theta;
  /// Every singular value of the training matrix.
  Vector spectrum;
  Index train_cols = 0;
  /// Column mean removed before projection; empty unless fitted with centering.
  Vector mean;

  Index ambient() const { return theta.rows(); }
  bool centered() const { return mean.size() > 0; }
};

/// Everything computed along the way by fit(); useful for diagnostics.
struct FitResult {
  PceModel model;
  SvdFactors svd;
  CoefficientFactor factor;
  /// Generalized eigenvalues paired with the columns of theta.
  Vector embedding_values;
};

FitResult fit_detailed(const Eigen::Ref<const Matrix>& d, double lambda,
                       const FitOptions& options = {});

/// SVD, dimension estimate, principal-coefficient graph and embedding.
PceModel fit(const Eigen::Ref<const Matrix>& d, double lambda, const FitOptions& options = {});

/// theta^T (y - mean). Throws DimensionMismatch when y.rows() != model.ambient().
Matrix transform(const PceModel& model, const Eigen::Ref<const Matrix>& y);

}  // namespace pce
