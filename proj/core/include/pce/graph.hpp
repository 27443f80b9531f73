#pragma once

#include <utility>

#include "pce/linalg.hpp"
#include "pce/pce.hpp"

namespace pce {

/// Sample-by-sample affinity. Column i describes how sample i is reconstructed
/// from the others (D ~ D A).
class AffinityGraph {
 public:
  enum class Kind { PceFactored, LleWeights };

  /// A = vk * vk^T, kept factored.
  static AffinityGraph factored(Matrix vk);
  /// Explicit n x n weights with zero diagonal, columns summing to one.
  static AffinityGraph weights(Matrix w);

  Kind kind() const { return kind_; }
  Index samples() const { return n_; }
  const Matrix& factor() const { return vk_; }
  const Matrix& weight_matrix() const { return w_; }
  /// Rank of the factored affinity; n for explicit weights.
  Index rank() const { return kind_ == Kind::PceFactored ? vk_.cols() : n_; }

  /// Dense A. Allocates n x n.
  Matrix dense() const;

 private:
  AffinityGraph(Kind kind, Matrix vk, Matrix w, Index n)
      : kind_(kind), vk_(std::move(vk)), w_(std::move(w)), n_(n) {}

  Kind kind_;
  Matrix vk_;
  Matrix w_;
  Index n_;
};

struct LleConfig {
  Index neighbors = 5;
  /// Local Gram regularizer, scaled by trace(G) / neighbors.
  double reg = 1e-3;
};

AffinityGraph pce_graph(const CoefficientFactor& factor);

/// Locally linear reconstruction weights over the p nearest neighbors of each
/// column (Euclidean, ties by ascending index).
///
/// Errors: InvalidArgument unless 1 <= p < n; DegenerateNeighborhood when the
/// regularized local Gram matrix is singular.
AffinityGraph lle_graph(const Eigen::Ref<const Matrix>& d, const LleConfig& cfg);

struct Embedding {
  /// m x dim projection with theta^T (D D^T + ridge I) theta = I.
  Matrix theta;
  /// Generalized eigenvalues paired with theta's columns, descending.
  Vector values;
  /// Full finite spectrum of the pencil, descending.
  Vector spectrum;
};

/// Eigenvalues of the embedding pencil above this count as informative.
inline constexpr double kEmbeddingEigenFloor = 1e-8;

/// Graph embedding: maximizes tr(theta^T D (A + A^T - A A^T) D^T theta) under
/// theta^T D D^T theta = I. For factored graphs the numerator is formed as
/// (D vk)(D vk)^T without touching an n x n matrix.
///
/// Errors: BadDim when dim < 1, when dim exceeds the factored graph's rank,
/// or when fewer than dim eigenvalues exceed kEmbeddingEigenFloor.
Embedding embed(const Eigen::Ref<const Matrix>& d, const AffinityGraph& graph, Index dim,
                double ridge = 0.0);
/// Same, reusing a skinny SVD of d for factored graphs without a ridge.
Embedding embed(const Eigen::Ref<const Matrix>& d, const SvdFactors& d_svd,
                const AffinityGraph& graph, Index dim, double ridge = 0.0);

}  // namespace pce
