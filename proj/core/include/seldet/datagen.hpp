#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "seldet/dataset.hpp"

namespace seldet {

/// Variety-trial generator settings. Random terms, in order:
/// year, center, variety, year.center, year.variety, variety.center.
struct TrialConfig {
  static constexpr std::size_t kRandomTerms = 6;

  Index years = 1;
  Index centers = 1;
  double centers_per_year_fraction = 1.0;  // in (0,1]
  Index control_varieties = 1;              // present every year
  Index new_varieties_per_year = 0;
  double mean_persistence = 1.0;  // years; lifetime = 1 + Poisson(mean - 1)
  double missing_fraction = 0.0;  // per (year, center, variety) cell, in [0,1)
  std::array<double, kRandomTerms> variance_components{1.0, 0.5, 2.0, 0.5, 0.3, 0.2};
  double grand_mean = 10.0;
  std::uint64_t seed = 1;

  /// Throws ConfigInvalid.
  void validate() const;

  /// Settings sized after the ten benchmark rows ("prob1" .. "prob10").
  static TrialConfig preset(const std::string& name);

  /// Applies one `key=value` setting; throws ConfigInvalid for unknown keys.
  void set(const std::string& key, const std::string& value);
  /// Reads `key=value` lines; '#' starts a comment.
  static TrialConfig parse(std::istream& in, TrialConfig base);
  static TrialConfig parse(std::istream& in);
};

extern const std::array<const char*, TrialConfig::kRandomTerms> kTrialTermNames;

/// Three-way crossed year x center x variety trial with a grand mean as the
/// only fixed effect and i.i.d. unit-variance residuals. Deterministic in
/// `config` (each random ingredient draws from its own seeded stream).
MixedModelDataset generate(const TrialConfig& config);

/// Counts in the benchmark table layout.
struct DesignSummary {
  Index years = 0;
  Index centers = 0;
  Index varieties = 0;
  Index year_center = 0;
  Index year_variety = 0;
  Index variety_center = 0;
  Index units = 0;
  double varieties_per_year = 0.0;  // y.v / year
  double years_per_variety = 0.0;   // y.v / variety
  Index controls = 0;               // varieties present in every year
  Index effects = 0;                // 1 + sum of random levels
};

/// Requires the six factors produced by generate(); throws ConfigInvalid otherwise.
DesignSummary design_summary(const MixedModelDataset& d);

void print_summary_table(std::ostream& out, const std::string& label, const DesignSummary& s);

}  // namespace seldet
