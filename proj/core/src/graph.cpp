#include "pce/graph.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "pce/error.hpp"

namespace pce {

AffinityGraph AffinityGraph::factored(Matrix vk) {
  const Index n = vk.rows();
  return AffinityGraph(Kind::PceFactored, std::move(vk), Matrix(), n);
}

AffinityGraph AffinityGraph::weights(Matrix w) {
  if (w.rows() != w.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "affinity weights must be square");
  }
  const Index n = w.rows();
  return AffinityGraph(Kind::LleWeights, Matrix(), std::move(w), n);
}

Matrix AffinityGraph::dense() const {
  if (kind_ == Kind::PceFactored) return vk_ * vk_.transpose();
  return w_;
}

AffinityGraph pce_graph(const CoefficientFactor& factor) {
  return AffinityGraph::factored(factor.vk);
}

AffinityGraph lle_graph(const Eigen::Ref<const Matrix>& d, const LleConfig& cfg) {
  const Index n = d.cols();
  const Index p = cfg.neighbors;
  if (p < 1 || p >= n) {
    throw Error(ErrorCode::InvalidArgument, "lle_graph: need 1 <= p < n (p = " +
                                                std::to_string(p) + ", n = " +
                                                std::to_string(n) + ")");
  }
  if (!(cfg.reg >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lle_graph: reg must be >= 0");
  require_finite(d, "lle_graph");

  Matrix w = Matrix::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  Vector dist(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) dist(j) = (d.col(j) - d.col(i)).squaredNorm();

    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    order.erase(order.begin() + i);
    std::partial_sort(order.begin(), order.begin() + p, order.end(), [&](Index a, Index b) {
      return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
    });

    Matrix local(d.rows(), p);
    for (Index t = 0; t < p; ++t) local.col(t) = d.col(order[t]) - d.col(i);
    Matrix gram = local.transpose() * local;
    const double trace = gram.trace();
    gram.diagonal().array() += cfg.reg * trace / static_cast<double>(p);

    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
      throw Error(ErrorCode::DegenerateNeighborhood,
                  "lle_graph: local Gram matrix of sample " + std::to_string(i) +
                      " is singular; increase reg");
    }
    Vector c = llt.solve(Vector::Ones(p));
    c /= c.sum();
    for (Index t = 0; t < p; ++t) w(order[t], i) = c(t);
  }
  return AffinityGraph::weights(std::move(w));
}

namespace {

// D (A + A^T - A A^T) D^T, symmetric.
Matrix numerator(const Eigen::Ref<const Matrix>& d, const AffinityGraph& graph) {
  const Index m = d.rows();
  Matrix out = Matrix::Zero(m, m);
  if (graph.kind() == AffinityGraph::Kind::PceFactored) {
    out.selfadjointView<Eigen::Lower>().rankUpdate(d * graph.factor());
    return Matrix(out.selfadjointView<Eigen::Lower>());
  }
  const Matrix& a = graph.weight_matrix();
  out = d * (a + a.transpose() - a * a.transpose()) * d.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix gram(const Eigen::Ref<const Matrix>& d) {
  Matrix out = Matrix::Zero(d.rows(), d.rows());
  out.selfadjointView<Eigen::Lower>().rankUpdate(d);
  return Matrix(out.selfadjointView<Eigen::Lower>());
}

Embedding embed_impl(const Eigen::Ref<const Matrix>& d, const SvdFactors* d_svd,
                     const AffinityGraph& graph, Index dim, double ridge) {
  if (graph.samples() != d.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "embed: graph has " + std::to_string(graph.samples()) + " samples, data has " +
                    std::to_string(d.cols()));
  }
  if (dim < 1) throw Error(ErrorCode::BadDim, "embed: dim must be >= 1");
  if (graph.kind() == AffinityGraph::Kind::PceFactored && dim > graph.rank()) {
    throw Error(ErrorCode::BadDim, "embed: dim " + std::to_string(dim) +
                                       " exceeds the affinity rank " +
                                       std::to_string(graph.rank()));
  }

  const Index available = std::min(dim, d.rows());
  GeneralizedEigs eig;
  try {
    if (graph.kind() == AffinityGraph::Kind::PceFactored && ridge == 0.0) {
      eig = d_svd ? generalized_top_eigs_factored(*d_svd, graph.factor(), available)
                  : generalized_top_eigs_factored(d, graph.factor(), available);
    } else {
      eig = generalized_top_eigs(numerator(d, graph), gram(d), available, ridge);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
    throw Error(ErrorCode::BadDim, std::string("embed: ") + e.what());
  }

  const Index informative = (eig.spectrum.array() > kEmbeddingEigenFloor).count();
  if (dim > informative || dim > eig.values.size()) {
    throw Error(ErrorCode::BadDim, "embed: dim " + std::to_string(dim) + " exceeds the " +
                                       std::to_string(informative) +
                                       " eigenvalues above 1e-8");
  }
  return Embedding{std::move(eig.vectors), std::move(eig.values), std::move(eig.spectrum)};
}


}  // namespace

Embedding embed(const Eigen::Ref<const Matrix>& d, const AffinityGraph& graph, Index dim,
                double ridge) {
  return embed_impl(d, nullptr, graph, dim, ridge);
}

Embedding embed(const Eigen::Ref<const Matrix>& d, const SvdFactors& d_svd,
                const AffinityGraph& graph, Index dim, double ridge) {
  if (d_svd.u.rows() != d.rows() || d_svd.v.rows() != d.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "embed: SVD factors do not match the data");
  }
  return embed_impl(d, &d_svd, graph, dim, ridge);
}

}  // namespace pce
