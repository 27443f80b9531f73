#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "experiment_config.hpp"
#include "model_file.hpp"
#include "pce/data.hpp"
#include "pce/error.hpp"
#include "pce/eval.hpp"
#include "pce/pce.hpp"
#include "pce/rng.hpp"
#include "pce/text_io.hpp"
#include "svg.hpp"

namespace pce::cli {
namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kGenerator = "pce-toolkit 1.0.0";

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  }
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

struct FitArgs {
  std::string data;
  double lambda = kDefaultLambda;
  bool center = false;
  double ridge = 0.0;
  std::string output;
};

int cmd_fit(const FitArgs& a, std::string& stage, std::ostream& out) {
  stage = "loading data";
  const LabeledDataset ds = load_matrix(a.data);
  stage = "fitting";
  require_positive_lambda(a.lambda);
  const auto start = Clock::now();
  const FitResult result = fit_detailed(ds.matrix, a.lambda, FitOptions{a.center, a.ridge});
  const double elapsed = seconds_since(start);
  const double error_norm = recover_clean(result.svd, result.model.k).error.norm();

  stage = "writing model";
  ModelFile file{result.model, {}};
  file.metadata["generator"] = kGenerator;
  file.metadata["source"] = a.data;
  file.metadata["center"] = a.center ? "true" : "false";
  save_model(file, a.output);

  out << "k=" << result.model.k << '\n'
      << "rank=" << result.svd.rank << '\n'
      << "error_norm=" << text::format_double(error_norm) << '\n'
      << "elapsed_s=" << text::format_double(elapsed) << '\n';
  return kExitOk;
}

struct TransformArgs {
  std::string model;
  std::string data;
  std::string output;
};

int cmd_transform(const TransformArgs& a, std::string& stage, std::ostream& out) {
  stage = "loading model";
  const ModelFile file = load_model(a.model);
  stage = "loading data";
  const LabeledDataset ds = load_matrix(a.data);
  stage = "projecting";
  if (ds.matrix.rows() != file.model.ambient()) {
    throw Error(ErrorCode::DimensionMismatch,
                "model theta is " + shape(file.model.theta) + " (m=" +
                    std::to_string(file.model.ambient()) + ") but data is " + shape(ds.matrix));
  }
  const Matrix z = transform(file.model, ds.matrix);
  stage = "writing features";
  save_matrix(z, a.output);
  out << "k=" << z.rows() << '\n' << "n=" << z.cols() << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string config;
  std::string output;
};

int cmd_eval(const EvalArgs& a, std::string& stage, std::ostream& out) {
  stage = "reading config";
  const ExperimentConfig cfg = load_experiment_config(a.config);
  stage = "running trials";
  const Report report = run_experiment(cfg);
  stage = "writing report";
  text::write_file_atomically(a.output, format_report_csv(report));
  out << "mean=" << text::format_double(report.mean) << " std=" << text::format_double(report.stddev)
      << " k_mode=" << report.k_mode() << '\n';
  return kExitOk;
}

struct SweepArgs {
  std::string data;
  std::string lambdas;
  std::string output;
  std::optional<std::uint64_t> seed;
  double train_fraction = 0.5;
  bool center = false;
};

int cmd_sweep(const SweepArgs& a, std::string& stage, std::ostream& out, std::ostream& err) {
  stage = "parsing lambdas";
  std::vector<double> lambdas = parse_lambdas(a.lambdas);
  for (double l : lambdas) require_positive_lambda(l);
  std::sort(lambdas.begin(), lambdas.end());

  stage = "loading data";
  const LabeledDataset ds = load_matrix(a.data);
  const bool with_accuracy = ds.labeled() && a.seed.has_value();

  stage = "sweeping";
  std::string csv = "lambda,k,accuracy\n";
  if (with_accuracy) {
    const TrainTestSplit parts = split(ds, a.train_fraction, *a.seed);
    Matrix train = parts.train.matrix;
    if (a.center) train.colwise() -= train.rowwise().mean();
    const SvdFactors svd = skinny_svd(train);
    for (double lambda : lambdas) {
      const Index k = estimate_dimension(svd.sigma, lambda);
      csv += text::format_double(lambda) + ',' + std::to_string(k) + ',';
      if (k > 0) {
        const PceModel model = fit(parts.train.matrix, lambda, FitOptions{a.center, 0.0});
        const auto predicted = nn_classify(transform(model, parts.train.matrix), parts.train.labels,
                                           transform(model, parts.test.matrix));
        csv += text::format_double(accuracy(predicted, parts.test.labels));
      }
      csv += '\n';
    }
  } else {
    Matrix data = ds.matrix;
    if (a.center) data.colwise() -= data.rowwise().mean();
    const SvdFactors svd = skinny_svd(data);
    for (double lambda : lambdas) {
      csv += text::format_double(lambda) + ',' +
             std::to_string(estimate_dimension(svd.sigma, lambda)) + ",\n";
    }
  }
  stage = "writing sweep";
  text::write_file_atomically(a.output, csv);

  stage = "checking monotonicity";
  std::istringstream written(text::read_file(a.output));
  std::string line;
  std::getline(written, line);  // header
  long long previous = -1;
  std::size_t rows = 0;
  while (std::getline(written, line)) {
    const auto fields = split_list(line, ',');
    const long long k = text::parse_integer(fields.at(1), rows + 2, 1);
    if (k < previous) {
      err << "pce sweep: k decreases at lambda=" << fields.at(0) << " (" << previous << " -> " << k
          << ")\n";
      return kExitNumerical;
    }
    previous = k;
    ++rows;
  }
  out << "rows=" << rows << '\n';
  return kExitOk;
}

struct SpectrumArgs {
  std::string data;
  std::string output;
  std::string svg;
  double lambda = kDefaultLambda;
};

int cmd_spectrum(const SpectrumArgs& a, std::string& stage, std::ostream& out) {
  stage = "loading data";
  const LabeledDataset ds = load_matrix(a.data);
  stage = "decomposing";
  require_positive_lambda(a.lambda);
  const SvdFactors svd = skinny_svd(ds.matrix);
  const Index k = estimate_dimension(svd.sigma, a.lambda);

  const Vector& s = svd.spectrum;
  const double total = s.squaredNorm();
  std::string csv = "index,sigma,sigma_c,cumulative_energy\n";
  double running = 0.0;
  std::vector<double> xs, ys;
  for (Index i = 0; i < s.size(); ++i) {
    running += s(i) * s(i);
    const double energy = (i + 1 == s.size()) ? 1.0 : running / total;
    csv += std::to_string(i + 1) + ',' + text::format_double(s(i)) + ',' + (i < k ? "1" : "0") +
           ',' + text::format_double(energy) + '\n';
    xs.push_back(static_cast<double>(i + 1));
    ys.push_back(s(i));
  }
  stage = "writing spectrum";
  text::write_file_atomically(a.output, csv);
  if (!a.svg.empty()) {
    text::write_file_atomically(
        a.svg, line_chart_svg("Singular values", "index", "sigma", xs, ys));
  }
  out << "k=" << k << '\n' << "rank=" << svd.rank << '\n';
  return kExitOk;
}

struct BenchArgs {
  std::string sizes;
  std::string output;
  std::uint64_t seed = 0;
  int repeats = 3;
  double lambda = kDefaultLambda;
};

int cmd_bench(const BenchArgs& a, std::string& stage, std::ostream& out) {
  stage = "parsing sizes";
  const auto sizes = parse_sizes(a.sizes);
  if (a.repeats < 1) throw Error(ErrorCode::ParseError, "--repeats must be >= 1");
  require_positive_lambda(a.lambda);

  std::string csv = "m,n,fit_s\n";
  for (const auto& [m, n] : sizes) {
    stage = "generating " + std::to_string(m) + "x" + std::to_string(n);
    const Matrix d = bench_matrix(m, n, a.seed);
    stage = "timing fit at " + std::to_string(m) + "x" + std::to_string(n);
    std::vector<double> times;
    for (int r = 0; r < a.repeats; ++r) {
      const auto start = Clock::now();
      const PceModel model = fit(d, a.lambda);
      times.push_back(seconds_since(start));
      if (model.k < 1) throw Error(ErrorCode::DegenerateDimension, "bench fit kept no direction");
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    csv += std::to_string(m) + ',' + std::to_string(n) + ',' + text::format_double(median) + '\n';
    out << "m=" << m << " n=" << n << " fit_s=" << text::format_double(median) << '\n';
  }
  stage = "writing bench";
  text::write_file_atomically(a.output, csv);
  return kExitOk;
}

}  // namespace

Matrix bench_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error(ErrorCode::InfeasibleSpec, "bench sizes must be positive");
  const Index dim = std::max<Index>(1, std::min<Index>({8, m / 8, n}));
  const Index classes = std::max<Index>(1, std::min<Index>({8, m / dim, n / dim}));
  SubspaceSpec spec;
  spec.ambient = m;
  for (Index c = 0; c < classes; ++c) {
    spec.subspaces.push_back(SubspaceBlock{dim, n / classes + (c < n % classes ? 1 : 0)});
  }
  const LabeledDataset ds = generate_union_of_subspaces(spec, derive_seed(seed, 0));
  return add_gaussian_noise(ds.matrix, 1e-3, std::nullopt, derive_seed(seed, 1));
}

std::vector<std::pair<Index, Index>> parse_sizes(const std::string& text) {
  std::vector<std::pair<Index, Index>> out;
  for (const auto& item : split_list(text, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) {
      throw Error(ErrorCode::ParseError, "size '" + item + "' is not of the form <m>x<n>");
    }
    const long long m = text::parse_integer(std::string_view(item).substr(0, x), 1, 1);
    const long long n = text::parse_integer(std::string_view(item).substr(x + 1), 1, x + 2);
    if (m < 1 || n < 1) throw Error(ErrorCode::ParseError, "size '" + item + "' must be positive");
    out.emplace_back(static_cast<Index>(m), static_cast<Index>(n));
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "no sizes given");
  return out;
}

std::vector<double> parse_lambdas(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split_list(spec, ':');
    if (parts.size() != 3) throw Error(ErrorCode::ParseError, "range must be start:stop:step");
    const double start = text::parse_double(parts[0], 1, 1);
    const double stop = text::parse_double(parts[1], 1, 1);
    const double step = text::parse_double(parts[2], 1, 1);
    if (!(step > 0.0) || stop < start) {
      throw Error(ErrorCode::ParseError, "range needs step > 0 and stop >= start");
    }
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    for (const auto& item : split_list(spec, ',')) out.push_back(text::parse_double(item, 1, 1));
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "empty lambda list");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Principal coefficients embedding: automatic subspace learning", "pce"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a projection and write a model file");
  fit_cmd->add_option("data", fit_args.data, "Dataset or matrix file")->required();
  fit_cmd->add_option("--lambda", fit_args.lambda, "Corruption trade-off (> 0)");
  fit_cmd->add_flag("--center", fit_args.center, "Subtract the column mean first");
  fit_cmd->add_option("--ridge", fit_args.ridge, "Metric ridge for the eigensolver");
  fit_cmd->add_option("--output,-o", fit_args.output, "Model file to write")->required();

  TransformArgs transform_args;
  auto* transform_cmd = app.add_subcommand("transform", "Project data with a fitted model");
  transform_cmd->add_option("model", transform_args.model, "Model file")->required();
  transform_cmd->add_option("data", transform_args.data, "Data file")->required();
  transform_cmd->add_option("--output,-o", transform_args.output, "Feature matrix to write")
      ->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Run a repeated-trial classification experiment");
  eval_cmd->add_option("config", eval_args.config, "key=value experiment config")->required();
  eval_cmd->add_option("--output,-o", eval_args.output, "Report CSV")->required();

  SweepArgs sweep_args;
  std::uint64_t sweep_seed = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Estimated dimension (and accuracy) across lambda");
  sweep_cmd->add_option("data", sweep_args.data, "Dataset or matrix file")->required();
  sweep_cmd->add_option("--lambda,--lambdas", sweep_args.lambdas, "List '1,3,5' or range '1:99:2'")
      ->required();
  sweep_cmd->add_option("--output,-o", sweep_args.output, "Sweep CSV")->required();
  auto* seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "Split seed; enables accuracy");
  sweep_cmd->add_option("--train-fraction", sweep_args.train_fraction, "Training share");
  sweep_cmd->add_flag("--center", sweep_args.center, "Subtract the column mean first");

  SpectrumArgs spectrum_args;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Singular values of D and of the coefficients");
  spectrum_cmd->add_option("data", spectrum_args.data, "Dataset or matrix file")->required();
  spectrum_cmd->add_option("--output,-o", spectrum_args.output, "Spectrum CSV")->required();
  spectrum_cmd->add_option("--svg", spectrum_args.svg, "Optional SVG chart");
  spectrum_cmd->add_option("--lambda", spectrum_args.lambda, "Trade-off used for C");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Time fit over generated data");
  bench_cmd->add_option("--sizes", bench_args.sizes, "Sizes '256x500,256x1000'")->required();
  bench_cmd->add_option("--output,-o", bench_args.output, "Timing CSV")->required();
  bench_cmd->add_option("--seed", bench_args.seed, "Generator seed");
  bench_cmd->add_option("--repeats", bench_args.repeats, "Timed repetitions (median kept)");
  bench_cmd->add_option("--lambda", bench_args.lambda, "Trade-off (> 0)");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("pce");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::string command = app.get_subcommands().front()->get_name();
  std::string stage = "starting";
  try {
    if (*fit_cmd) return cmd_fit(fit_args, stage, out);
    if (*transform_cmd) return cmd_transform(transform_args, stage, out);
    if (*eval_cmd) return cmd_eval(eval_args, stage, out);
    if (*sweep_cmd) {
      if (*seed_opt) sweep_args.seed = sweep_seed;
      return cmd_sweep(sweep_args, stage, out, err);
    }
    if (*spectrum_cmd) return cmd_spectrum(spectrum_args, stage, out);
    if (*bench_cmd) return cmd_bench(bench_args, stage, out);
  } catch (const Error& e) {
    err << "pce " << command << ": " << stage << " failed: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitInput : kExitNumerical;
  } catch (const std::exception& e) {
    err << "pce " << command << ": " << stage << " failed: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace pce::cli
