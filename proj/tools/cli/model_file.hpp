#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "pce/pce.hpp"

namespace pce::cli {

inline constexpr const char* kModelMagic = "pce-model";
inline constexpr const char* kModelVersion = "v1";

/// Persisted fit. Text format:
///
///   pce-model v1
///   # meta <key>=<value>        (creation metadata, any number)
///   lambda=<float>
///   k=<int>
///   m=<int>
///   n=<int>                      (training columns)
///   spectrum=<floats>
///   mean=<floats>                (only for centered fits)
///   theta:
///   <m lines of k floats>
struct ModelFile {
  PceModel model;
  std::map<std::string, std::string> metadata;
};

std::string format_model(const ModelFile& file);
ModelFile parse_model(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace pce::cli
