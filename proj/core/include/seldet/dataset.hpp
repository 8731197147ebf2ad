#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seldet/error.hpp"

namespace seldet {

/// Categorical column: one level per observation (-1 for no membership).
struct Factor {
  std::string name;
  std::vector<std::string> labels;  // level -> label
  std::vector<Index> level;         // observation -> level

  Index levels() const noexcept { return static_cast<Index>(labels.size()); }

  /// Levels numbered by first appearance.
  static Factor from_labels(std::string name, const std::vector<std::string>& per_observation);
};

/// y = X tau + Z u + e with Z made of dummy columns, one block per random
/// factor, and residuals partitioned into blocks sharing a variance ratio.
struct MixedModelDataset {
  std::vector<double> y;
  Eigen::MatrixXd X;                   // n x p
  std::vector<Factor> fixed_factors;   // labels X was built from; may be empty for a custom X
  std::vector<Factor> random_factors;  // Z = [Z_1 ... Z_F]
  Factor residual_blocks;

  Index n_obs() const noexcept { return static_cast<Index>(y.size()); }
  Index p() const noexcept { return static_cast<Index>(X.cols()); }
  Index b() const;
  Index residual_block_count() const noexcept { return residual_blocks.levels(); }
  /// Column offset of each random factor inside Z.
  std::vector<Index> factor_offsets() const;

  /// Checks shapes and level ranges, that every residual label covers its
  /// observations, that no random factor is empty (EmptyFactor) and that X
  /// has full column rank (RankDeficientX).
  void validate() const;
};

/// Intercept followed by treatment-coded dummies (first level dropped) for
/// each fixed factor.
Eigen::MatrixXd design_from_factors(Index n, const std::vector<Factor>& fixed);

/// Builds X from `fixed` and, when `residual` is empty, a single residual block.
MixedModelDataset make_dataset(std::vector<double> y, std::vector<Factor> fixed, std::vector<Factor> random,
                               Factor residual = {});

/// Tab-separated text with a header row. The first column is the response;
/// other columns are named `fixed:<name>`, `random:<name>` or `resid:<name>`
/// (at most one). "NA" is rejected.
MixedModelDataset read_dataset(std::istream& in);
MixedModelDataset read_dataset(const std::filesystem::path& path);

void write_dataset(const MixedModelDataset& d, std::ostream& out);
void write_dataset(const MixedModelDataset& d, const std::filesystem::path& path);

}  // namespace seldet
