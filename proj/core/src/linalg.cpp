#include "pce/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "pce/error.hpp"

namespace pce {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kClusterTolerance = 1e-9;
constexpr double kEchelonZero = 1e-8;

std::string shape(const Eigen::Ref<const Matrix>& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_symmetric(const Eigen::Ref<const Matrix>& m, const char* name) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::NotSymmetric, std::string(name) + " is not symmetric (max |m - m^T| = " +
                                             std::to_string(asym) + ")");
  }
}

void fix_sign(Eigen::Ref<Vector> x) {
  Index at = 0;
  x.cwiseAbs().maxCoeff(&at);
  if (x(at) < 0.0) x = -x;
}

// Rotates the columns of `block` into column-echelon form: column j is zero in
// every row above its pivot and pivots strictly increase. The rotation is
// orthogonal, so metric orthonormality of the block is preserved.
void echelon_columns(Eigen::Ref<Matrix> block) {
  const Index cols = block.cols();
  for (Index j = 0; j + 1 < cols; ++j) {
    auto rest = block.rightCols(cols - j);
    const Vector row_norms = rest.rowwise().norm();
    const double largest = row_norms.maxCoeff();
    if (largest == 0.0) return;
    Index pivot = 0;
    while (row_norms(pivot) <= kEchelonZero * largest) ++pivot;

    const Vector v = rest.row(pivot).transpose() / row_norms(pivot);
    Vector w = v;
    w(0) -= 1.0;
    const double ww = w.squaredNorm();
    if (ww < 1e-30) continue;
    // Householder reflector mapping e1 onto v.
    const Matrix reflector = Matrix::Identity(w.size(), w.size()) - (2.0 / ww) * w * w.transpose();
    rest = (rest * reflector).eval();
  }
}

// Canonical basis for one cluster of (numerically) equal generalized
// eigenvalues. Columns of `block` are metric-orthonormal on entry and on exit.
void canonicalize_cluster(Eigen::Ref<Matrix> block) {
  const Index c = block.cols();
  if (c > 1) {
    Eigen::SelfAdjointEigenSolver<Matrix> gram(block.transpose() * block);
    if (gram.info() != Eigen::Success) {
      throw Error(ErrorCode::NotConverged, "Gram eigensolve for a degenerate cluster failed");
    }
    block = (block * gram.eigenvectors()).eval();  // ascending Euclidean norm

    const Vector& g = gram.eigenvalues();
    const double tol = kClusterTolerance * g.cwiseAbs().maxCoeff();
    Index start = 0;
    for (Index i = 1; i <= c; ++i) {
      if (i == c || g(i) - g(i - 1) > tol) {
        if (i - start > 1) echelon_columns(block.middleCols(start, i - start));
        start = i;
      }
    }
  }
  for (Index j = 0; j < c; ++j) fix_sign(block.col(j));
}

// Eigenpairs of the whitened pencil mapped back through `whitening`, with
// tied clusters canonicalized.
GeneralizedEigs solve_whitened(Matrix reduced, const Matrix& whitening, Index count) {
  reduced = (0.5 * (reduced + reduced.transpose())).eval();
  const Index n = whitening.rows();
  const Index p = whitening.cols();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NotConverged, "generalized_top_eigs: reduced eigensolve failed");
  }

  GeneralizedEigs out;
  out.spectrum = eig.eigenvalues().reverse();
  if (count == 0) {
    out.vectors.resize(n, 0);
    return out;
  }

  // Extend past `count` while the next eigenvalue ties with the last kept one,
  // so a cluster cut by `count` is canonicalized as a whole.
  const double tie = kClusterTolerance * std::max(1.0, out.spectrum.cwiseAbs().maxCoeff());
  Index extent = count;
  while (extent < p && out.spectrum(extent - 1) - out.spectrum(extent) <= tie) ++extent;

  Matrix vectors = whitening * eig.eigenvectors().rightCols(extent).rowwise().reverse();
  Index start = 0;
  for (Index i = 1; i <= extent; ++i) {
    if (i == extent || out.spectrum(i - 1) - out.spectrum(i) > tie) {
      canonicalize_cluster(vectors.middleCols(start, i - start));
      start = i;
    }
  }

  out.values = out.spectrum.head(count);
  out.vectors = vectors.leftCols(count);
  return out;
}


}  // namespace

void require_finite(const Eigen::Ref<const Matrix>& d, const char* what) {
  if (!d.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + ": input contains NaN or Inf");
  }
}

SvdFactors skinny_svd(const Eigen::Ref<const Matrix>& d) {
  if (d.rows() < 1 || d.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "skinny_svd: empty matrix " + shape(d));
  }
  require_finite(d, "skinny_svd");
  if (d.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::ZeroMatrix, "skinny_svd: all entries are zero");
  }

  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
      d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = kRankTolerance * static_cast<double>(std::max(d.rows(), d.cols())) * s(0);
  if (!(s(0) > 0.0)) {
    throw Error(ErrorCode::ZeroMatrix, "skinny_svd: largest singular value is zero");
  }

  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;

  SvdFactors out;
  out.rank = rank;
  out.spectrum = s;
  out.sigma = s.head(rank);
  out.u = svd.matrixU().leftCols(rank);
  out.v = svd.matrixV().leftCols(rank);
  for (Index i = 0; i < rank; ++i) {
    Index at = 0;
    out.v.col(i).cwiseAbs().maxCoeff(&at);
    if (out.v(at, i) < 0.0) {
      out.v.col(i) = -out.v.col(i);
      out.u.col(i) = -out.u.col(i);
    }
  }
  return out;
}

double suggested_ridge(const Eigen::Ref<const Matrix>& r) {
  if (r.rows() == 0) return 0.0;
  return 1e-10 * r.trace() / static_cast<double>(r.rows());
}

GeneralizedEigs generalized_top_eigs(const Eigen::Ref<const Matrix>& l,
                                     const Eigen::Ref<const Matrix>& r, Index count,
                                     double ridge) {
  if (l.rows() != l.cols() || r.rows() != r.cols() || l.rows() != r.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "generalized_top_eigs: l is " + shape(l) + ", r is " + shape(r));
  }
  const Index n = l.rows();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "generalized_top_eigs: empty pencil");
  if (count < 0 || count > n) {
    throw Error(ErrorCode::DimensionMismatch, "generalized_top_eigs: count " +
                                                  std::to_string(count) + " outside [0, " +
                                                  std::to_string(n) + "]");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::InvalidArgument, "generalized_top_eigs: ridge must be finite and >= 0");
  }
  require_finite(l, "generalized_top_eigs (l)");
  require_finite(r, "generalized_top_eigs (r)");
  require_symmetric(l, "l");
  require_symmetric(r, "r");

  // Whiten by the metric on its numerical range.
  Matrix metric = 0.5 * (r + r.transpose());
  metric.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> metric_eig(metric);
  if (metric_eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NotConverged, "generalized_top_eigs: metric eigensolve failed");
  }
  const Vector& w = metric_eig.eigenvalues();  // ascending
  const double top = w(n - 1);
  if (!(top > 0.0)) {
    throw Error(ErrorCode::RankDeficient, "generalized_top_eigs: metric has no positive direction");
  }
  if (w(0) < -1e-8 * top) {
    throw Error(ErrorCode::InvalidArgument,
                "generalized_top_eigs: metric is not positive semidefinite (min eigenvalue " +
                    std::to_string(w(0)) + ")");
  }
  const double range_cut = 1e-12 * static_cast<double>(n) * top;
  Index dropped = 0;
  while (dropped < n && w(dropped) <= range_cut) ++dropped;
  const Index p = n - dropped;
  if (count > p) {
    throw Error(ErrorCode::RankDeficient, "generalized_top_eigs: requested " +
                                              std::to_string(count) +
                                              " eigenpairs but the metric has rank " +
                                              std::to_string(p));
  }

  const Matrix whitening = metric_eig.eigenvectors().rightCols(p) *
                           w.tail(p).cwiseSqrt().cwiseInverse().asDiagonal();
  Matrix reduced = whitening.transpose() * l * whitening;
  return solve_whitened(reduced, whitening, count);
}


GeneralizedEigs generalized_top_eigs_factored(const SvdFactors& f,
                                              const Eigen::Ref<const Matrix>& c, Index count) {
  if (c.rows() != f.v.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "generalized_top_eigs_factored: f has " + std::to_string(f.v.rows()) +
                    " columns, c is " + shape(c));
  }
  const Index n = f.u.rows();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "generalized_top_eigs_factored: empty pencil");
  if (count < 0 || count > n) {
    throw Error(ErrorCode::DimensionMismatch, "generalized_top_eigs_factored: count " +
                                                  std::to_string(count) + " outside [0, " +
                                                  std::to_string(n) + "]");
  }
  require_finite(c, "generalized_top_eigs_factored (c)");
  const Vector& s = f.sigma;
  if (s.size() == 0 || !(s(0) > 0.0)) {
    throw Error(ErrorCode::RankDeficient, "generalized_top_eigs_factored: metric has no positive direction");
  }
  // Same range cut as the dense path, applied to the squared singular values.
  const double range_cut = 1e-12 * static_cast<double>(n) * s(0) * s(0);
  Index p = 0;
  while (p < s.size() && s(p) * s(p) > range_cut) ++p;
  if (count > p) {
    throw Error(ErrorCode::RankDeficient, "generalized_top_eigs_factored: requested " +
                                              std::to_string(count) +
                                              " eigenpairs but the metric has rank " +
                                              std::to_string(p));
  }
  const Matrix whitening = f.u.leftCols(p) * s.head(p).cwiseInverse().asDiagonal();
  // W^T f = V_p^T exactly, so the whitened factor of l is V_p^T c.
  const Matrix g = f.v.leftCols(p).transpose() * c;
  return solve_whitened(g * g.transpose(), whitening, count);
}

GeneralizedEigs generalized_top_eigs_factored(const Eigen::Ref<const Matrix>& f,
                                              const Eigen::Ref<const Matrix>& c, Index count) {
  if (c.rows() != f.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "generalized_top_eigs_factored: f is " + shape(f) + ", c is " + shape(c));
  }
  require_finite(f, "generalized_top_eigs_factored (f)");
  if (f.size() == 0 || f.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::RankDeficient, "generalized_top_eigs_factored: metric has no positive direction");
  }
  return generalized_top_eigs_factored(skinny_svd(f), c, count);
}

}  // namespace pce
