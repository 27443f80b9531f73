#include "pce/graph.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pce/data.hpp"
#include "pce/error.hpp"

namespace pce {
namespace {

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(LleGraph, MidpointOfCollinearNeighbors) {
  Matrix d(2, 3);
  d << 0, 1, 2,
       0, 1, 2;
  const AffinityGraph g = lle_graph(d, LleConfig{2, 1e-3});
  ASSERT_EQ(g.kind(), AffinityGraph::Kind::LleWeights);
  const Matrix& w = g.weight_matrix();
  EXPECT_NEAR(w(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(w(2, 1), 0.5, 1e-12);
  EXPECT_EQ(w(1, 1), 0.0);
}

TEST(LleGraph, DuplicateNeighborsShareWeightEqually) {
  Matrix d(2, 3);
  d << 1, 1, 0,
       1, 1, 0;
  d(0, 2) = 1;
  d(1, 2) = 1.5;
  // Columns 0 and 1 coincide; column 2 sees both at the same distance.
  const Matrix w = lle_graph(d, LleConfig{2, 1e-3}).weight_matrix();
  EXPECT_NEAR(w(0, 2), w(1, 2), 1e-12);
  EXPECT_NEAR(w(0, 2), 0.5, 1e-12);
}

TEST(LleGraph, ColumnsSumToOneWithZeroDiagonal) {
  std::mt19937_64 rng(3);
  const Matrix d = testing::random_matrix(6, 25, rng);
  const Matrix w = lle_graph(d, LleConfig{5, 1e-3}).weight_matrix();
  ASSERT_EQ(w.rows(), 25);
  for (Index j = 0; j < 25; ++j) {
    EXPECT_NEAR(w.col(j).sum(), 1.0, 1e-12);
    EXPECT_EQ(w(j, j), 0.0);
    EXPECT_EQ((w.col(j).array() != 0.0).count(), 5);
  }
}

TEST(LleGraph, WeightsMatchRegularizedLocalSolve) {
  std::mt19937_64 rng(5);
  const Matrix d = testing::random_matrix(4, 12, rng);
  const Index p = 3;
  const double reg = 1e-2;
  const Matrix w = lle_graph(d, LleConfig{p, reg}).weight_matrix();
  for (Index i = 0; i < 12; ++i) {
    // Brute-force neighbor search and a pseudo-inverse solve as the oracle.
    std::vector<std::pair<double, Index>> dist;
    for (Index j = 0; j < 12; ++j) {
      if (j != i) dist.emplace_back((d.col(j) - d.col(i)).squaredNorm(), j);
    }
    std::sort(dist.begin(), dist.end());
    Matrix z(4, p);
    for (Index t = 0; t < p; ++t) z.col(t) = d.col(dist[t].second) - d.col(i);
    Matrix gram = z.transpose() * z;
    gram.diagonal().array() += reg * gram.trace() / p;
    Vector x = testing::pseudo_inverse(gram) * Vector::Ones(p);
    x /= x.sum();
    for (Index t = 0; t < p; ++t) EXPECT_NEAR(w(dist[t].second, i), x(t), 1e-10);
  }
}

TEST(LleGraph, Errors) {
  Matrix d(2, 3);
  d << 0, 1, 2,
       0, 1, 2;
  EXPECT_EQ(code_of([&] { lle_graph(d, LleConfig{3, 1e-3}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { lle_graph(d, LleConfig{0, 1e-3}); }), ErrorCode::InvalidArgument);
  // Two collinear neighbor offsets with no regularization: singular Gram.
  EXPECT_EQ(code_of([&] { lle_graph(d, LleConfig{2, 0.0}); }), ErrorCode::DegenerateNeighborhood);
}

TEST(Embed, PceGraphGivesScaledLeftSingularVectors) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 0.1;
  const CoefficientFactor f = principal_coefficients(skinny_svd(d), 1.0);
  const Embedding e = embed(d, pce_graph(f), 1);
  EXPECT_NEAR(e.theta(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(e.theta(1, 0), 0.0, 1e-14);
  EXPECT_NEAR(e.values(0), 1.0, 1e-12);
}

TEST(Embed, PceContractOnRandomData) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix d = testing::random_low_rank(20, 30, 6, rng) + 1e-2 * testing::random_matrix(20, 30, rng);
    const SvdFactors svd = skinny_svd(d);
    const double lambda = 1.0 / (svd.sigma(5) * svd.sigma(6));  // threshold between 6 and 7
    const CoefficientFactor f = principal_coefficients(svd, lambda);
    ASSERT_EQ(f.k, 6);
    const Embedding e = embed(d, pce_graph(f), f.k);
    const Matrix gram = e.theta.transpose() * d * d.transpose() * e.theta;
    EXPECT_LT((gram - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((e.values.array() - 1.0).abs().maxCoeff(), 1e-6);
    const Matrix oracle = svd.u.leftCols(6) * svd.sigma.head(6).cwiseInverse().asDiagonal();
    EXPECT_LT(testing::max_principal_angle(e.theta, oracle), 1e-6);
    EXPECT_EQ((e.spectrum.array() > kEmbeddingEigenFloor).count(), 6);
  }
}

TEST(Embed, FactoredAndDenseGraphsAgree) {
  std::mt19937_64 rng(22);
  const Matrix d = testing::random_low_rank(10, 16, 4, rng);
  const CoefficientFactor f = principal_coefficients(skinny_svd(d), 1e6);
  const AffinityGraph factored = pce_graph(f);
  const AffinityGraph dense = AffinityGraph::weights(factored.dense());
  EXPECT_EQ(dense.kind(), AffinityGraph::Kind::LleWeights);
  const Embedding a = embed(d, factored, f.k);
  const Embedding b = embed(d, dense, f.k);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(testing::max_principal_angle(a.theta, b.theta), 1e-6);
}

TEST(Embed, PrecomputedSvdGivesSameEmbedding) {
  std::mt19937_64 rng(24);
  const Matrix d = testing::random_low_rank(12, 20, 5, rng) + 1e-3 * testing::random_matrix(12, 20, rng);
  const SvdFactors svd = skinny_svd(d);
  const AffinityGraph g = pce_graph(principal_coefficients(svd, 1e3));
  const Embedding a = embed(d, g, 5);
  const Embedding b = embed(d, svd, g, 5);
  EXPECT_TRUE((a.theta.array() == b.theta.array()).all());
  EXPECT_EQ(code_of([&] { embed(d.topRows(11), svd, g, 5); }), ErrorCode::DimensionMismatch);
}

TEST(Embed, LleMatchesDenseGeneralizedOracle) {
  std::mt19937_64 rng(23);
  const Matrix d = testing::random_matrix(5, 30, rng);
  const AffinityGraph g = lle_graph(d, LleConfig{6, 1e-3});
  const Matrix w = g.weight_matrix();
  const Matrix l = d * (w + w.transpose() - w * w.transpose()) * d.transpose();
  const Matrix r = d * d.transpose();
  const Vector oracle = testing::dense_generalized_eigenvalues(l, r);
  const Embedding e = embed(d, g, 2);
  ASSERT_GT(oracle(1), kEmbeddingEigenFloor);
  EXPECT_NEAR(e.values(0), oracle(0), 1e-9);
  EXPECT_NEAR(e.values(1), oracle(1), 1e-9);
  EXPECT_LT((e.theta.transpose() * r * e.theta - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((l * e.theta - r * e.theta * e.values.asDiagonal()).norm(), 1e-8 * l.norm());
}

TEST(Embed, IndependentSubspacesSpanTheData) {
  const LabeledDataset ds = generate_union_of_subspaces(SubspaceSpec::uniform(30, 3, 2, 8), 4);
  const SvdFactors svd = skinny_svd(ds.matrix);
  const CoefficientFactor f = principal_coefficients(svd, 1e8);
  ASSERT_EQ(f.k, 6);
  const Embedding e = embed(ds.matrix, pce_graph(f), 6);
  EXPECT_LT(testing::max_principal_angle(e.theta, svd.u.leftCols(6)), 1e-8);
}

TEST(Embed, Errors) {
  Matrix d = Matrix::Identity(3, 3);
  const CoefficientFactor f{Matrix::Identity(3, 2), 2};
  EXPECT_EQ(code_of([&] { embed(d, pce_graph(f), 0); }), ErrorCode::BadDim);
  EXPECT_EQ(code_of([&] { embed(d, pce_graph(f), 3); }), ErrorCode::BadDim);
  // The zero graph has no informative directions.
  EXPECT_EQ(code_of([&] { embed(d, AffinityGraph::weights(Matrix::Zero(3, 3)), 1); }), ErrorCode::BadDim);
}

}  // namespace
}  // namespace pce
