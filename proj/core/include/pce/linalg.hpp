#pragma once

#include <Eigen/Core>

namespace pce {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense m x n data matrix; columns are samples.
using DataMatrix = Matrix;

/// Singular values at or below this fraction of sigma_1, scaled by max(m, n),
/// are treated as numerically zero.
inline constexpr double kRankTolerance = 1e-12;

/// Thin SVD truncated to the numerical rank.
///
/// Invariants: u and v have orthonormal columns, sigma is nonincreasing with
/// sigma[rank - 1] > kRankTolerance * max(m, n) * sigma[0], and
/// u * sigma.asDiagonal() * v^T reproduces the input.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;
  Index rank = 0;
  /// All min(m, n) singular values, including the ones dropped by the rank cut.
  Vector spectrum;
};

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& d, const char* what);

/// Skinny SVD of d.
///
/// Each singular pair is sign-fixed so that the largest-magnitude entry of the
/// right singular vector is positive (first such entry on ties). Throws
/// ZeroMatrix when d has no nonzero entry and NonFinite on NaN/Inf input.
SvdFactors skinny_svd(const Eigen::Ref<const Matrix>& d);

/// Ridge suggested for a singular metric matrix r: 1e-10 * trace(r) / n.
double suggested_ridge(const Eigen::Ref<const Matrix>& r);

/// Result of a symmetric-definite generalized eigensolve l x = mu (r + eps I) x.
struct GeneralizedEigs {
  /// The requested leading eigenvalues, descending.
  Vector values;
  /// Column i pairs with values[i]; vectors^T (r + eps I) vectors = I.
  Matrix vectors;
  /// Every finite eigenvalue of the pencil (one per direction in the range of
  /// r + eps I), descending.
  Vector spectrum;
};

/// Leading generalized eigenpairs of the pencil (l, r + ridge * I).
///
/// The metric is eigendecomposed and the problem is whitened on its numerical
/// range, so a singular r (ridge = 0) restricts the pencil to range(r) instead
/// of failing. Inside a cluster of equal eigenvalues (relative 1e-9) the basis
/// is made canonical:
///   1. columns are rotated to be mutually orthogonal in the Euclidean metric
///      and ordered by ascending Euclidean norm;
///   2. remaining ties are resolved into column-echelon form, ordered by
///      ascending index of the first nonzero coordinate;
///   3. each column is signed so its largest-magnitude coordinate is positive.
///
/// Errors: DimensionMismatch for shape problems, NotSymmetric when l or r is
/// asymmetric beyond 1e-10 (relative to its largest entry), RankDeficient when
/// count exceeds the rank of r + ridge * I, NotConverged if the inner
/// symmetric eigensolver fails.
GeneralizedEigs generalized_top_eigs(const Eigen::Ref<const Matrix>& l,
                                     const Eigen::Ref<const Matrix>& r, Index count,
                                     double ridge = 0.0);

/// The pencil (f c c^T f^T, f f^T) with no ridge, solved from the factors.
/// Whitening uses the SVD f = U S V^T, under which the whitened numerator is
/// (V^T c)(V^T c)^T; no condition number gets squared. Same range cut,
/// cluster canonicalization and errors as generalized_top_eigs.
GeneralizedEigs generalized_top_eigs_factored(const Eigen::Ref<const Matrix>& f,
                                              const Eigen::Ref<const Matrix>& c, Index count);
/// As above with f given by its skinny SVD.
GeneralizedEigs generalized_top_eigs_factored(const SvdFactors& f,
                                              const Eigen::Ref<const Matrix>& c, Index count);

}  // namespace pce
