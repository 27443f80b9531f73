#include "pce/pce.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pce/error.hpp"
#include "pce/graph.hpp"

namespace pce {

Index estimate_dimension(std::span<const double> sigma, double lambda) {
  if (sigma.empty()) throw Error(ErrorCode::EmptySpectrum, "estimate_dimension: empty spectrum");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  }
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!std::isfinite(sigma[i]) || sigma[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "estimate_dimension: singular value " + std::to_string(i) +
                      " is negative or non-finite");
    }
    if (i > 0 && sigma[i] > sigma[i - 1] + kDimensionTieTolerance) {
      throw Error(ErrorCode::NotSorted,
                  "estimate_dimension: spectrum increases at index " + std::to_string(i));
    }
  }

  // cost(r) = r + lambda * tail(r), tail(r) = sum of sigma_i^2 over i >= r (0-based).
  const std::size_t len = sigma.size();
  std::vector<double> cost(len + 1);
  double tail = 0.0;
  cost[len] = static_cast<double>(len);
  for (std::size_t r = len; r-- > 0;) {
    tail += sigma[r] * sigma[r];
    cost[r] = static_cast<double>(r) + lambda * tail;
  }
  double best = cost[0];
  for (double c : cost) best = std::min(best, c);
  std::size_t k = 0;
  while (cost[k] > best + kDimensionTieTolerance) ++k;
  return static_cast<Index>(k);
}

Index estimate_dimension(const Vector& sigma, double lambda) {
  return estimate_dimension(std::span<const double>(sigma.data(), sigma.size()), lambda);
}

CoefficientFactor principal_coefficients(const SvdFactors& svd, double lambda) {
  const Index k = estimate_dimension(svd.sigma, lambda);
  if (k == 0) {
    const double s1 = svd.sigma(0);
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambda = " << lambda << " keeps no direction (lambda * sigma_1^2 <= 1); "
        << "use lambda > " << 1.0 / (s1 * s1);
    throw Error(ErrorCode::DegenerateDimension, msg.str());
  }
  return CoefficientFactor{svd.v.leftCols(k), k};
}

Matrix materialize_affinity(const CoefficientFactor& factor, Index cap) {
  if (factor.samples() > cap) {
    throw Error(ErrorCode::TooLarge, "materialize_affinity: n = " +
                                         std::to_string(factor.samples()) + " exceeds cap " +
                                         std::to_string(cap));
  }
  return factor.vk * factor.vk.transpose();
}

CleanSplit recover_clean(const SvdFactors& svd, Index k) {
  if (k < 1 || k > svd.rank) {
    throw Error(ErrorCode::BadK, "recover_clean: k = " + std::to_string(k) + " outside [1, " +
                                     std::to_string(svd.rank) + "]");
  }
  const Index tail = svd.rank - k;
  CleanSplit out;
  out.clean = svd.u.leftCols(k) * svd.sigma.head(k).asDiagonal() * svd.v.leftCols(k).transpose();
  out.error = svd.u.rightCols(tail) * svd.sigma.tail(tail).asDiagonal() *
              svd.v.rightCols(tail).transpose();
  return out;
}

FitResult fit_detailed(const Eigen::Ref<const Matrix>& d, double lambda,
                       const FitOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  }
  require_finite(d, "fit");

  Matrix data = d;
  Vector mean;
  if (options.center) {
    mean = data.rowwise().mean();
    data.colwise() -= mean;
  }

  FitResult out;
  out.svd = skinny_svd(data);
  out.factor = principal_coefficients(out.svd, lambda);
  const AffinityGraph graph = pce_graph(out.factor);
  Embedding emb = embed(data, out.svd, graph, out.factor.k, options.ridge);

  out.model.lambda = lambda;
  out.model.k = out.factor.k;
  out.model.theta = std::move(emb.theta);
  out.model.spectrum = out.svd.spectrum;
  out.model.train_cols = d.cols();
  out.model.mean = std::move(mean);
  out.embedding_values = std::move(emb.values);
  return out;
}

PceModel fit(const Eigen::Ref<const Matrix>& d, double lambda, const FitOptions& options) {
  return fit_detailed(d, lambda, options).model;
}

Matrix transform(const PceModel& model, const Eigen::Ref<const Matrix>& y) {
  if (y.rows() != model.ambient()) {
    throw Error(ErrorCode::DimensionMismatch,
                "transform: model expects " + std::to_string(model.ambient()) +
                    " rows, data is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
  if (model.centered()) {
    return model.theta.transpose() * (y.colwise() - model.mean);
  }
  return model.theta.transpose() * y;
}

}  // namespace pce
