#pragma once

#include <filesystem>
#include <string>

#include "pce/eval.hpp"

namespace pce::cli {

/// Parses key=value experiment configuration text. Relative dataset paths
/// resolve against `base_dir`. Throws ParseError naming the line on any
/// unknown key or malformed value.
///
/// Keys (all optional):
///   source             synthetic | <dataset path>          (synthetic)
///   ambient            m                                    (50)
///   classes            number of subspaces                  (5)
///   subspace_dim       dimension of each subspace           (4)
///   samples_per_class  samples per subspace                 (20)
///   basis              independent-orthogonal | random-gaussian
///   coeff_scale        coefficient range                    (1)
///   noise              none | gaussian | pixel              (none)
///   rho                corruption ratio                     (0.1)
///   clip               <low>,<high>
///   noise_stage        before-split | after-split
///   method             pce | pca | lle-npe | raw            (pce)
///   lambda             positive real                        (1)
///   dim                integer | auto                       (auto)
///   neighbors, reg     lle-npe neighborhood size / regularizer
///   center             true | false                         (false)
///   classifier         nn
///   trials, train_fraction, base_seed
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace pce::cli
