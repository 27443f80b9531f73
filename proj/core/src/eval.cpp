#include "pce/eval.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "pce/error.hpp"
#include "pce/rng.hpp"
#include "pce/text_io.hpp"

namespace pce {

std::vector<int> nn_classify(const Eigen::Ref<const Matrix>& train_z,
                             std::span<const int> train_labels,
                             const Eigen::Ref<const Matrix>& test_z) {
  if (train_z.cols() == 0) throw Error(ErrorCode::EmptyTrainingSet, "nn_classify: no training samples");
  if (static_cast<Index>(train_labels.size()) != train_z.cols()) {
    throw Error(ErrorCode::LengthMismatch, "nn_classify: " + std::to_string(train_labels.size()) +
                                               " labels for " + std::to_string(train_z.cols()) +
                                               " training columns");
  }
  if (train_z.rows() != test_z.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "nn_classify: training features have " + std::to_string(train_z.rows()) +
                    " rows, test features " + std::to_string(test_z.rows()));
  }
  std::vector<int> out(static_cast<std::size_t>(test_z.cols()));
  for (Index t = 0; t < test_z.cols(); ++t) {
    Index best = 0;
    double best_dist = (train_z.col(0) - test_z.col(t)).squaredNorm();
    for (Index j = 1; j < train_z.cols(); ++j) {
      const double dist = (train_z.col(j) - test_z.col(t)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    out[static_cast<std::size_t>(t)] = train_labels[static_cast<std::size_t>(best)];
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, "accuracy: " + std::to_string(predicted.size()) +
                                               " predictions for " + std::to_string(truth.size()) +
                                               " labels");
  }
  if (truth.empty()) throw Error(ErrorCode::LengthMismatch, "accuracy: no samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

PcaModel pca_fit(const Eigen::Ref<const Matrix>& d, Index dim) {
  const Index limit = std::min(d.rows(), d.cols() - 1);
  if (dim < 1 || dim > limit) {
    throw Error(ErrorCode::BadDim, "pca_fit: dim " + std::to_string(dim) + " outside [1, " +
                                       std::to_string(limit) + "]");
  }
  require_finite(d, "pca_fit");
  PcaModel model;
  model.mean = d.rowwise().mean();
  const Matrix centered = d.colwise() - model.mean;
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(centered,
                                                                         Eigen::ComputeThinU);
  model.projection = svd.matrixU().leftCols(dim);
  for (Index j = 0; j < dim; ++j) {
    Index at = 0;
    model.projection.col(j).cwiseAbs().maxCoeff(&at);
    if (model.projection(at, j) < 0.0) model.projection.col(j) *= -1.0;
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Eigen::Ref<const Matrix>& y) {
  if (y.rows() != model.projection.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "pca_transform: model expects " +
                                                  std::to_string(model.projection.rows()) +
                                                  " rows, got " + std::to_string(y.rows()));
  }
  return model.projection.transpose() * (y.colwise() - model.mean);
}

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::Pce: return "pce";
    case MethodKind::Pca: return "pca";
    case MethodKind::LleNpe: return "lle-npe";
    case MethodKind::Raw: return "raw";
  }
  return "unknown";
}

std::optional<MethodKind> parse_method(std::string_view name) {
  for (MethodKind k : {MethodKind::Pce, MethodKind::Pca, MethodKind::LleNpe, MethodKind::Raw}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

Index Report::k_mode() const {
  std::map<Index, int> counts;
  for (const auto& t : trials) ++counts[t.k];
  Index best = 0;
  int best_count = 0;
  for (const auto& [k, c] : counts) {
    if (c > best_count) {
      best = k;
      best_count = c;
    }
  }
  return best;
}

void summarize(Report& report) {
  const auto n = static_cast<double>(report.trials.size());
  report.mean = 0.0;
  report.stddev = 0.0;
  if (report.trials.empty()) return;
  for (const auto& t : report.trials) report.mean += t.accuracy;
  report.mean /= n;
  if (report.trials.size() > 1) {
    double ss = 0.0;
    for (const auto& t : report.trials) ss += (t.accuracy - report.mean) * (t.accuracy - report.mean);
    report.stddev = std::sqrt(ss / (n - 1.0));
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Index auto_dimension(const Matrix& train, double lambda) {
  const SvdFactors svd = skinny_svd(train);
  const Index k = estimate_dimension(svd.sigma, lambda);
  if (k == 0) {
    throw Error(ErrorCode::DegenerateDimension,
                "lambda = " + text::format_double(lambda) + " keeps no direction");
  }
  return k;
}

TrialResult run_trial(const ExperimentConfig& cfg, const LabeledDataset* loaded, Index t) {
  const std::uint64_t trial_seed = cfg.base_seed + static_cast<std::uint64_t>(t);

  LabeledDataset ds = loaded ? *loaded
                             : generate_union_of_subspaces(std::get<SubspaceSpec>(cfg.source),
                                                           derive_seed(trial_seed, 0));
  if (cfg.noise && cfg.noise_stage == NoiseStage::BeforeSplit) {
    ds.matrix = apply_noise(ds.matrix, *cfg.noise, derive_seed(trial_seed, 1));
  }
  TrainTestSplit parts = split(ds, cfg.train_fraction, derive_seed(trial_seed, 2));
  if (cfg.noise && cfg.noise_stage == NoiseStage::AfterSplit) {
    parts.train.matrix = apply_noise(parts.train.matrix, *cfg.noise, derive_seed(trial_seed, 1));
    parts.test.matrix = apply_noise(parts.test.matrix, *cfg.noise, derive_seed(trial_seed, 3));
  }
  const Matrix& train = parts.train.matrix;
  const Matrix& test = parts.test.matrix;
  const MethodConfig& method = cfg.method;

  TrialResult result;
  result.trial = t;
  Matrix train_z;
  Matrix test_z;

  auto start = Clock::now();
  switch (method.kind) {
    case MethodKind::Pce: {
      const PceModel model = fit(train, method.lambda, FitOptions{method.center, 0.0});
      result.fit_seconds = seconds_since(start);
      result.k = model.k;
      start = Clock::now();
      train_z = transform(model, train);
      test_z = transform(model, test);
      break;
    }
    case MethodKind::Pca: {
      const Index dim = method.dim > 0 ? method.dim : auto_dimension(train, method.lambda);
      const PcaModel model = pca_fit(train, dim);
      result.fit_seconds = seconds_since(start);
      result.k = dim;
      start = Clock::now();
      train_z = pca_transform(model, train);
      test_z = pca_transform(model, test);
      break;
    }
    case MethodKind::LleNpe: {
      const Index dim = method.dim > 0 ? method.dim : auto_dimension(train, method.lambda);
      Vector mean;
      Matrix centered = train;
      if (method.center) {
        mean = train.rowwise().mean();
        centered.colwise() -= mean;
      }
      const Matrix theta = embed(centered, lle_graph(centered, method.lle), dim).theta;
      result.fit_seconds = seconds_since(start);
      result.k = dim;
      start = Clock::now();
      if (method.center) {
        train_z = theta.transpose() * centered;
        test_z = theta.transpose() * (test.colwise() - mean);
      } else {
        train_z = theta.transpose() * train;
        test_z = theta.transpose() * test;
      }
      break;
    }
    case MethodKind::Raw:
      result.fit_seconds = seconds_since(start);
      result.k = train.rows();
      start = Clock::now();
      train_z = train;
      test_z = test;
      break;
  }
  result.transform_seconds = seconds_since(start);

  start = Clock::now();
  const std::vector<int> predicted = nn_classify(train_z, parts.train.labels, test_z);
  result.classify_seconds = seconds_since(start);
  result.accuracy = accuracy(predicted, parts.test.labels);
  return result;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  if (cfg.classifier != "nn") {
    throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + cfg.classifier + "' (valid: nn)");
  }

  std::optional<LabeledDataset> loaded;
  if (const auto* path = std::get_if<std::filesystem::path>(&cfg.source)) {
    loaded = load_matrix(*path);
    if (!loaded->labeled()) {
      throw Error(ErrorCode::ParseError, path->string() + ": experiments need a labeled dataset");
    }
  }

  Report report;
  for (Index t = 0; t < cfg.trials; ++t) {
    try {
      report.trials.push_back(run_trial(cfg, loaded ? &*loaded : nullptr, t));
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(t) + " failed: " + e.what());
    }
  }
  summarize(report);
  return report;
}

std::string format_report_csv(const Report& report) {
  std::string out = "trial,accuracy,k,fit_s,transform_s,classify_s\n";
  double fit = 0.0;
  double tr = 0.0;
  double cl = 0.0;
  for (const auto& t : report.trials) {
    out += std::to_string(t.trial) + ',' + text::format_double(t.accuracy) + ',' +
           std::to_string(t.k) + ',' + text::format_double(t.fit_seconds) + ',' +
           text::format_double(t.transform_seconds) + ',' +
           text::format_double(t.classify_seconds) + '\n';
    fit += t.fit_seconds;
    tr += t.transform_seconds;
    cl += t.classify_seconds;
  }
  const double n = std::max<double>(1.0, static_cast<double>(report.trials.size()));
  out += "summary," + text::format_double(report.mean) + ',' + std::to_string(report.k_mode()) +
         ',' + text::format_double(fit / n) + ',' + text::format_double(tr / n) + ',' +
         text::format_double(cl / n) + '\n';
  return out;
}

}  // namespace pce
