#include "model_file.hpp"

#include <string_view>
#include <vector>

#include "pce/error.hpp"
#include "pce/text_io.hpp"

namespace pce::cli {
namespace {

void append_row(std::string& out, const Vector& values) {
  for (Index i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    text::append_double(out, values(i));
  }
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

Vector parse_row(std::string_view body, std::size_t line, std::size_t column_offset) {
  const auto tokens = text::split_whitespace(body);
  Vector out(static_cast<Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out(static_cast<Index>(i)) =
        text::parse_double(tokens[i].text, line, tokens[i].column + column_offset);
  }
  return out;
}

}  // namespace

std::string format_model(const ModelFile& file) {
  const PceModel& model = file.model;
  std::string out = std::string(kModelMagic) + ' ' + kModelVersion + '\n';
  for (const auto& [key, value] : file.metadata) out += "# meta " + key + '=' + value + '\n';
  out += "lambda=" + text::format_double(model.lambda) + '\n';
  out += "k=" + std::to_string(model.k) + '\n';
  out += "m=" + std::to_string(model.theta.rows()) + '\n';
  out += "n=" + std::to_string(model.train_cols) + '\n';
  out += "spectrum=";
  append_row(out, model.spectrum);
  out += '\n';
  if (model.centered()) {
    out += "mean=";
    append_row(out, model.mean);
    out += '\n';
  }
  out += "theta:\n";
  for (Index i = 0; i < model.theta.rows(); ++i) {
    append_row(out, model.theta.row(i).transpose());
    out += '\n';
  }
  return out;
}

ModelFile parse_model(const std::string& content) {
  ModelFile file;
  PceModel& model = file.model;

  struct Line {
    std::size_t number;
    std::string_view text;
  };
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    ++number;
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (line[first] == '#') {
      constexpr std::string_view tag = "# meta ";
      if (line.substr(first, tag.size()) == tag) {
        const std::string_view kv = line.substr(first + tag.size());
        const auto eq = kv.find('=');
        if (eq != std::string_view::npos) {
          file.metadata[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
        }
      }
      continue;
    }
    lines.push_back(Line{number, line});
  }
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty model file");

  const auto header = text::split_whitespace(lines[0].text);
  if (header.empty() || header[0].text != kModelMagic) {
    fail(lines[0].number, "expected 'pce-model' header");
  }
  if (header.size() != 2 || header[1].text != kModelVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "line " + std::to_string(lines[0].number) + ": model format '" +
                    std::string(lines[0].text) + "' is not supported (expected pce-model v1)");
  }

  bool have_lambda = false, have_k = false, have_m = false, have_spectrum = false;
  long long m = 0;
  std::size_t i = 1;
  for (; i < lines.size(); ++i) {
    const std::string_view line = lines[i].text;
    const std::size_t ln = lines[i].number;
    if (line == "theta:") break;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ln, "expected key=value, got '" + std::string(line) + "'");
    const std::string_view key = line.substr(0, eq);
    const std::string_view value = line.substr(eq + 1);
    if (key == "lambda") {
      model.lambda = text::parse_double(value, ln, eq + 2);
      have_lambda = true;
    } else if (key == "k") {
      model.k = static_cast<Index>(text::parse_integer(value, ln, eq + 2));
      have_k = true;
    } else if (key == "m") {
      m = text::parse_integer(value, ln, eq + 2);
      have_m = true;
    } else if (key == "n") {
      model.train_cols = static_cast<Index>(text::parse_integer(value, ln, eq + 2));
    } else if (key == "spectrum") {
      model.spectrum = parse_row(value, ln, eq + 1);
      have_spectrum = true;
    } else if (key == "mean") {
      model.mean = parse_row(value, ln, eq + 1);
    } else {
      fail(ln, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_lambda || !have_k || !have_m || !have_spectrum) {
    throw Error(ErrorCode::ParseError, "model file is missing one of lambda, k, m, spectrum");
  }
  if (i == lines.size()) throw Error(ErrorCode::ParseError, "model file has no 'theta:' block");
  if (model.k < 1 || m < 1) throw Error(ErrorCode::ParseError, "model needs k >= 1 and m >= 1");
  if (model.mean.size() != 0 && model.mean.size() != m) {
    throw Error(ErrorCode::ShapeError, "mean has " + std::to_string(model.mean.size()) +
                                           " entries, expected m=" + std::to_string(m));
  }

  const std::size_t rows = lines.size() - i - 1;
  if (rows != static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::ParseError, "theta has " + std::to_string(rows) + " rows, header says m=" +
                                           std::to_string(m));
  }
  model.theta.resize(static_cast<Index>(m), model.k);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& line = lines[i + 1 + r];
    const Vector row = parse_row(line.text, line.number, 0);
    if (row.size() != model.k) {
      throw Error(ErrorCode::ShapeError, "theta row " + std::to_string(r + 1) + " (line " +
                                             std::to_string(line.number) + ") has " +
                                             std::to_string(row.size()) + " values, expected k=" +
                                             std::to_string(model.k));
    }
    model.theta.row(static_cast<Index>(r)) = row.transpose();
  }
  return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  text::write_file_atomically(path, format_model(file));
}

ModelFile load_model(const std::filesystem::path& path) {
  try {
    return parse_model(text::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace pce::cli
