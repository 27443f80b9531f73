#include "experiment_config.hpp"

#include <sstream>
#include <string_view>

#include "pce/error.hpp"
#include "pce/text_io.hpp"

namespace pce::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "config line " + std::to_string(line) + ": " + what);
}

bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "expected true or false, got '" + std::string(v) + "'");
}

Index parse_count(std::string_view v, std::size_t line, std::size_t col, long long min) {
  const long long x = text::parse_integer(v, line, col);
  if (x < min) fail(line, "value " + std::to_string(x) + " must be >= " + std::to_string(min));
  return static_cast<Index>(x);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& content,
                                         const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.method.dim = 0;

  std::string source = "synthetic";
  Index ambient = 50, classes = 5, subspace_dim = 4, per_class = 20;
  BasisRule basis = BasisRule::IndependentOrthogonal;
  double coeff_scale = 1.0;
  std::string noise = "none";
  NoiseSpec noise_spec;

  std::istringstream in(content);
  std::string raw;
  std::size_t ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ln, "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::size_t col = eq + 2;

    if (key == "source") {
      source = std::string(value);
    } else if (key == "ambient") {
      ambient = parse_count(value, ln, col, 1);
    } else if (key == "classes") {
      classes = parse_count(value, ln, col, 1);
    } else if (key == "subspace_dim") {
      subspace_dim = parse_count(value, ln, col, 1);
    } else if (key == "samples_per_class") {
      per_class = parse_count(value, ln, col, 1);
    } else if (key == "basis") {
      if (value == "independent-orthogonal") {
        basis = BasisRule::IndependentOrthogonal;
      } else if (value == "random-gaussian") {
        basis = BasisRule::RandomGaussian;
      } else {
        fail(ln, "unknown basis '" + std::string(value) +
                     "' (valid: independent-orthogonal, random-gaussian)");
      }
    } else if (key == "coeff_scale") {
      coeff_scale = text::parse_double(value, ln, col);
    } else if (key == "noise") {
      if (value != "none" && value != "gaussian" && value != "pixel") {
        fail(ln, "unknown noise '" + std::string(value) + "' (valid: none, gaussian, pixel)");
      }
      noise = std::string(value);
    } else if (key == "rho") {
      noise_spec.rho = text::parse_double(value, ln, col);
    } else if (key == "clip") {
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) fail(ln, "clip expects <low>,<high>");
      const double lo = text::parse_double(trim(value.substr(0, comma)), ln, col);
      const double hi = text::parse_double(trim(value.substr(comma + 1)), ln, col + comma + 1);
      if (!(lo < hi)) fail(ln, "clip needs low < high");
      noise_spec.clip = std::make_pair(lo, hi);
    } else if (key == "noise_stage") {
      if (value == "before-split") {
        cfg.noise_stage = NoiseStage::BeforeSplit;
      } else if (value == "after-split") {
        cfg.noise_stage = NoiseStage::AfterSplit;
      } else {
        fail(ln, "unknown noise_stage '" + std::string(value) + "' (valid: before-split, after-split)");
      }
    } else if (key == "method") {
      const auto kind = parse_method(value);
      if (!kind) {
        fail(ln, "unknown method '" + std::string(value) + "' (valid methods: pce, pca, lle-npe, raw)");
      }
      cfg.method.kind = *kind;
    } else if (key == "lambda") {
      cfg.method.lambda = text::parse_double(value, ln, col);
    } else if (key == "dim") {
      cfg.method.dim = value == "auto" ? 0 : parse_count(value, ln, col, 1);
    } else if (key == "neighbors") {
      cfg.method.lle.neighbors = parse_count(value, ln, col, 1);
    } else if (key == "reg") {
      cfg.method.lle.reg = text::parse_double(value, ln, col);
    } else if (key == "center") {
      cfg.method.center = parse_bool(value, ln);
    } else if (key == "classifier") {
      if (value != "nn") fail(ln, "unknown classifier '" + std::string(value) + "' (valid: nn)");
      cfg.classifier = std::string(value);
    } else if (key == "trials") {
      cfg.trials = parse_count(value, ln, col, 1);
    } else if (key == "train_fraction") {
      cfg.train_fraction = text::parse_double(value, ln, col);
      if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        fail(ln, "train_fraction must lie in (0, 1)");
      }
    } else if (key == "base_seed") {
      cfg.base_seed = static_cast<std::uint64_t>(parse_count(value, ln, col, 0));
    } else {
      fail(ln, "unknown key '" + key + "'");
    }
  }

  if (source == "synthetic") {
    SubspaceSpec spec = SubspaceSpec::uniform(ambient, classes, subspace_dim, per_class, basis);
    spec.coeff_scale = coeff_scale;
    cfg.source = spec;
  } else {
    std::filesystem::path p(source);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.source = p;
  }
  if (noise == "gaussian") {
    noise_spec.kind = NoiseKind::Gaussian;
    cfg.noise = noise_spec;
  } else if (noise == "pixel") {
    noise_spec.kind = NoiseKind::Pixel;
    cfg.noise = noise_spec;
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(text::read_file(path), path.parent_path());
}

}  // namespace pce::cli
