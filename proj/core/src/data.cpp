#include "pce/data.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <string_view>

#include "pce/error.hpp"
#include "pce/rng.hpp"
#include "pce/text_io.hpp"

namespace pce {

int LabeledDataset::num_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void validate_labels(const LabeledDataset& ds) {
  if (!ds.labeled()) return;
  if (static_cast<Index>(ds.labels.size()) != ds.matrix.cols()) {
    throw Error(ErrorCode::ShapeError, std::to_string(ds.labels.size()) + " labels for " +
                                           std::to_string(ds.matrix.cols()) + " columns");
  }
  const int s = ds.num_classes();
  std::vector<char> seen(static_cast<std::size_t>(std::max(s, 0)), 0);
  for (int label : ds.labels) {
    if (label < 0) throw Error(ErrorCode::ParseError, "negative class label " + std::to_string(label));
    seen[static_cast<std::size_t>(label)] = 1;
  }
  for (int c = 0; c < s; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw Error(ErrorCode::ParseError, "class " + std::to_string(c) + " has no samples");
    }
  }
}

SubspaceSpec SubspaceSpec::uniform(Index ambient, Index classes, Index dim, Index count,
                                   BasisRule basis) {
  SubspaceSpec spec;
  spec.ambient = ambient;
  spec.basis = basis;
  spec.subspaces.assign(static_cast<std::size_t>(classes), SubspaceBlock{dim, count});
  return spec;
}

Index SubspaceSpec::total_dim() const {
  Index total = 0;
  for (const auto& b : subspaces) total += b.dim;
  return total;
}

Index SubspaceSpec::total_count() const {
  Index total = 0;
  for (const auto& b : subspaces) total += b.count;
  return total;
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  }
  return g;
}

Matrix orthonormal_columns(const Matrix& g) {
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

std::string basis_name(BasisRule rule) {
  return rule == BasisRule::IndependentOrthogonal ? "independent-orthogonal" : "random-gaussian";
}

}  // namespace

LabeledDataset generate_union_of_subspaces(const SubspaceSpec& spec, std::uint64_t seed) {
  auto infeasible = [](const std::string& why) { throw Error(ErrorCode::InfeasibleSpec, why); };
  if (spec.ambient < 1) infeasible("ambient dimension must be >= 1");
  if (spec.subspaces.empty()) infeasible("no subspaces requested");
  if (!(spec.coeff_scale > 0.0) || !std::isfinite(spec.coeff_scale)) {
    infeasible("coeff_scale must be positive");
  }
  for (std::size_t i = 0; i < spec.subspaces.size(); ++i) {
    const auto& b = spec.subspaces[i];
    if (b.dim < 1 || b.dim > spec.ambient) {
      infeasible("subspace " + std::to_string(i) + " has dimension " + std::to_string(b.dim) +
                 " outside [1, " + std::to_string(spec.ambient) + "]");
    }
    if (b.count < b.dim) {
      infeasible("subspace " + std::to_string(i) + " has fewer samples than dimensions");
    }
  }
  if (spec.basis == BasisRule::IndependentOrthogonal && spec.total_dim() > spec.ambient) {
    infeasible("independent subspaces need total dimension " + std::to_string(spec.total_dim()) +
               " <= ambient " + std::to_string(spec.ambient));
  }

  Rng basis_rng(derive_seed(seed, 0));
  Rng coeff_rng(derive_seed(seed, 1));

  std::vector<Matrix> bases;
  if (spec.basis == BasisRule::IndependentOrthogonal) {
    const Matrix q = orthonormal_columns(gaussian_matrix(spec.ambient, spec.total_dim(), basis_rng));
    Index offset = 0;
    for (const auto& b : spec.subspaces) {
      bases.push_back(q.middleCols(offset, b.dim));
      offset += b.dim;
    }
  } else {
    for (const auto& b : spec.subspaces) {
      bases.push_back(orthonormal_columns(gaussian_matrix(spec.ambient, b.dim, basis_rng)));
    }
  }

  LabeledDataset ds;
  ds.matrix.resize(spec.ambient, spec.total_count());
  ds.labels.reserve(static_cast<std::size_t>(spec.total_count()));
  Index col = 0;
  for (std::size_t c = 0; c < spec.subspaces.size(); ++c) {
    const auto& b = spec.subspaces[c];
    Matrix coeffs(b.dim, b.count);
    for (Index j = 0; j < b.count; ++j) {
      for (Index i = 0; i < b.dim; ++i) coeffs(i, j) = coeff_rng.uniform(-spec.coeff_scale, spec.coeff_scale);
    }
    ds.matrix.middleCols(col, b.count) = bases[c] * coeffs;
    ds.labels.insert(ds.labels.end(), static_cast<std::size_t>(b.count), static_cast<int>(c));
    col += b.count;
  }
  ds.meta["source"] = "synthetic";
  ds.meta["seed"] = std::to_string(seed);
  ds.meta["basis"] = basis_name(spec.basis);
  return ds;
}

Matrix add_gaussian_noise(const Eigen::Ref<const Matrix>& d, double rho,
                          std::optional<std::pair<double, double>> clip, std::uint64_t seed) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian noise: rho must be positive");
  }
  if (clip && !(clip->first < clip->second)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian noise: clip range must have low < high");
  }
  Matrix out = d;
  for (Index j = 0; j < out.cols(); ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    for (Index i = 0; i < out.rows(); ++i) {
      double v = out(i, j) + rho * rng.normal();
      if (clip) v = std::clamp(v, clip->first, clip->second);
      out(i, j) = v;
    }
  }
  return out;
}

Matrix add_pixel_corruption(const Eigen::Ref<const Matrix>& d, double rho, std::uint64_t seed) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "pixel corruption: rho must lie in (0, 1]");
  }
  const Index m = d.rows();
  const Index replaced = std::min<Index>(m, static_cast<Index>(std::floor(rho * static_cast<double>(m) + 0.5)));
  Matrix out = d;
  std::vector<Index> rows(static_cast<std::size_t>(m));
  for (Index j = 0; j < out.cols(); ++j) {
    const double pmax = d.col(j).maxCoeff();
    if (!(pmax > 0.0)) continue;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::iota(rows.begin(), rows.end(), Index{0});
    for (Index t = 0; t < replaced; ++t) {
      const auto pick = t + static_cast<Index>(rng.index(static_cast<std::uint64_t>(m - t)));
      std::swap(rows[static_cast<std::size_t>(t)], rows[static_cast<std::size_t>(pick)]);
      out(rows[static_cast<std::size_t>(t)], j) = rng.uniform(0.0, pmax);
    }
  }
  return out;
}

Matrix apply_noise(const Eigen::Ref<const Matrix>& d, const NoiseSpec& noise, std::uint64_t seed) {
  if (noise.kind == NoiseKind::Gaussian) return add_gaussian_noise(d, noise.rho, noise.clip, seed);
  Matrix out = add_pixel_corruption(d, noise.rho, seed);
  if (noise.clip) out = out.cwiseMax(noise.clip->first).cwiseMin(noise.clip->second);
  return out;
}

LabeledDataset select_columns(const LabeledDataset& ds, const std::vector<Index>& columns) {
  LabeledDataset out;
  out.meta = ds.meta;
  out.matrix.resize(ds.matrix.rows(), static_cast<Index>(columns.size()));
  for (std::size_t t = 0; t < columns.size(); ++t) {
    out.matrix.col(static_cast<Index>(t)) = ds.matrix.col(columns[t]);
    if (ds.labeled()) out.labels.push_back(ds.labels[static_cast<std::size_t>(columns[t])]);
  }
  return out;
}

TrainTestSplit split(const LabeledDataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split: train fraction must lie in (0, 1)");
  }
  if (!ds.labeled()) throw Error(ErrorCode::InvalidArgument, "split: dataset has no labels");
  validate_labels(ds);

  const int s = ds.num_classes();
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(s));
  for (std::size_t j = 0; j < ds.labels.size(); ++j) {
    members[static_cast<std::size_t>(ds.labels[j])].push_back(static_cast<Index>(j));
  }

  Rng rng(seed);
  TrainTestSplit out;
  for (int c = 0; c < s; ++c) {
    auto& idx = members[static_cast<std::size_t>(c)];
    const auto nc = static_cast<Index>(idx.size());
    if (nc < 2) {
      throw Error(ErrorCode::TooFewSamples,
                  "split: class " + std::to_string(c) + " has " + std::to_string(nc) +
                      " sample(s); need at least 2");
    }
    for (Index t = nc - 1; t > 0; --t) {
      const auto pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(t + 1)));
      std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
    }
    Index ntrain = static_cast<Index>(std::floor(train_fraction * static_cast<double>(nc) + 0.5));
    ntrain = std::clamp<Index>(ntrain, 1, nc - 1);
    out.train_columns.insert(out.train_columns.end(), idx.begin(), idx.begin() + ntrain);
    out.test_columns.insert(out.test_columns.end(), idx.begin() + ntrain, idx.end());
  }
  std::sort(out.train_columns.begin(), out.train_columns.end());
  std::sort(out.test_columns.begin(), out.test_columns.end());
  out.train = select_columns(ds, out.train_columns);
  out.test = select_columns(ds, out.test_columns);
  out.train.meta["split"] = "train";
  out.test.meta["split"] = "test";
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct ContentLine {
  std::size_t number;
  std::string_view text;
};

std::size_t header_value(const std::vector<text::Token>& tokens, std::string_view key,
                         std::size_t line) {
  for (const auto& t : tokens) {
    if (t.text.size() > key.size() && t.text.substr(0, key.size()) == key &&
        t.text[key.size()] == '=') {
      const long long v = text::parse_integer(t.text.substr(key.size() + 1), line,
                                              t.column + key.size() + 1);
      if (v < 0) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": negative " +
                                               std::string(key));
      }
      return static_cast<std::size_t>(v);
    }
  }
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": header is missing " + std::string(key) + "=");
}

}  // namespace

LabeledDataset parse_matrix(const std::string& content) {
  LabeledDataset ds;
  std::vector<ContentLine> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    ++number;
    pos = end + 1;

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (line[first] == '#') {
      std::string_view rest = line.substr(first + 1);
      constexpr std::string_view tag = " meta ";
      if (rest.substr(0, tag.size()) == tag) {
        rest.remove_prefix(tag.size());
        const auto eq = rest.find('=');
        if (eq != std::string_view::npos) {
          std::string_view value = rest.substr(eq + 1);
          while (!value.empty() && value.back() == '\r') value.remove_suffix(1);
          ds.meta[std::string(rest.substr(0, eq))] = std::string(value);
        }
      }
      continue;
    }
    lines.push_back(ContentLine{number, line});
  }
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty file: missing header");

  const auto header = text::split_whitespace(lines[0].text);
  const std::size_t hline = lines[0].number;
  if (header.size() < 2 ||
      (header[0].text != "pce-dataset" && header[0].text != "pce-matrix")) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(hline) + ": expected 'pce-dataset' or 'pce-matrix' header");
  }
  if (header[1].text != "v1") {
    throw Error(ErrorCode::VersionMismatch, "line " + std::to_string(hline) +
                                                ": unsupported version '" +
                                                std::string(header[1].text) + "'");
  }
  const bool labeled = header[0].text == "pce-dataset";
  const std::size_t m = header_value(header, "m", hline);
  const std::size_t n = header_value(header, "n", hline);
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(hline) + ": m and n must be >= 1");
  }

  std::size_t next = 1;
  if (labeled) {
    const std::size_t classes = header_value(header, "classes", hline);
    if (next >= lines.size()) throw Error(ErrorCode::ParseError, "missing labels line");
    const auto tokens = text::split_whitespace(lines[next].text);
    const std::size_t lline = lines[next].number;
    if (tokens.size() != n) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lline) + ": header declares n=" +
                                             std::to_string(n) + " but labels line has " +
                                             std::to_string(tokens.size()) + " entries");
    }
    for (const auto& t : tokens) {
      const long long label = text::parse_integer(t.text, lline, t.column);
      if (label < 0 || static_cast<std::size_t>(label) >= classes) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lline) + ", column " +
                                               std::to_string(t.column) + ": label " +
                                               std::to_string(label) + " outside [0, " +
                                               std::to_string(classes) + ")");
      }
      ds.labels.push_back(static_cast<int>(label));
    }
    if (static_cast<std::size_t>(ds.num_classes()) != classes) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lline) + ": header declares " +
                                             std::to_string(classes) + " classes, labels use " +
                                             std::to_string(ds.num_classes()));
    }
    ++next;
  }

  const std::size_t body = lines.size() - next;
  if (body != m) {
    throw Error(ErrorCode::ParseError, "header declares m=" + std::to_string(m) + " but body has " +
                                           std::to_string(body) + " rows");
  }
  std::vector<std::vector<text::Token>> rows;
  rows.reserve(m);
  for (std::size_t r = 0; r < m; ++r) rows.push_back(text::split_whitespace(lines[next + r].text));

  const std::size_t first_width = rows[0].size();
  const bool uniform_width = std::all_of(rows.begin(), rows.end(),
                                         [&](const auto& row) { return row.size() == first_width; });
  if (uniform_width && first_width != n) {
    throw Error(ErrorCode::ParseError, "header declares n=" + std::to_string(n) +
                                           " but every row has " + std::to_string(first_width) +
                                           " values");
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (rows[r].size() != n) {
      throw Error(ErrorCode::ShapeError, "row " + std::to_string(r + 1) + " (line " +
                                             std::to_string(lines[next + r].number) + ") has " +
                                             std::to_string(rows[r].size()) + " values, expected " +
                                             std::to_string(n));
    }
  }

  ds.matrix.resize(static_cast<Index>(m), static_cast<Index>(n));
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t lno = lines[next + r].number;
    for (std::size_t c = 0; c < n; ++c) {
      const auto& tok = rows[r][c];
      const double v = text::parse_double(tok.text, lno, tok.column);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lno) + ", column " +
                                               std::to_string(tok.column) + ": non-finite value");
      }
      ds.matrix(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
  }
  return ds;
}

LabeledDataset load_matrix(const std::filesystem::path& path) {
  try {
    return parse_matrix(text::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_matrix(const LabeledDataset& ds) {
  validate_labels(ds);
  std::string out;
  const auto m = ds.matrix.rows();
  const auto n = ds.matrix.cols();
  if (ds.labeled()) {
    out += "pce-dataset v1 m=" + std::to_string(m) + " n=" + std::to_string(n) +
           " classes=" + std::to_string(ds.num_classes()) + "\n";
  } else {
    out += "pce-matrix v1 m=" + std::to_string(m) + " n=" + std::to_string(n) + "\n";
  }
  for (const auto& [key, value] : ds.meta) out += "# meta " + key + "=" + value + "\n";
  if (ds.labeled()) {
    for (std::size_t j = 0; j < ds.labels.size(); ++j) {
      if (j) out += ' ';
      out += std::to_string(ds.labels[j]);
    }
    out += '\n';
  }
  out.reserve(out.size() + static_cast<std::size_t>(m * n) * 24);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j) out += ' ';
      text::append_double(out, ds.matrix(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_matrix(const LabeledDataset& ds, const std::filesystem::path& path) {
  text::write_file_atomically(path, format_matrix(ds));
}

void save_matrix(const Eigen::Ref<const Matrix>& m, const std::filesystem::path& path) {
  LabeledDataset ds;
  ds.matrix = m;
  save_matrix(ds, path);
}

}  // namespace pce
