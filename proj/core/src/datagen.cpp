#include "seldet/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace seldet {

const std::array<const char*, TrialConfig::kRandomTerms> kTrialTermNames = {
    "year", "center", "variety", "year.center", "year.variety", "variety.center"};

namespace {

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// One independent mt19937_64 stream per random ingredient. Only the raw
// 64-bit outputs are used, which the standard pins down exactly; the
// distributions below are written out so results do not depend on the
// standard library's distribution implementations.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t id) : gen_(splitmix64(seed ^ splitmix64(id + 1))) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0,1)

  Index below(Index m) { return std::min<Index>(m - 1, static_cast<Index>(uniform() * static_cast<double>(m))); }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Inversion; lambda here stays small (a few years).
  Index poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double u = uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    Index k = 0;
    while (u > cdf && k < 10000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

 private:
  std::mt19937_64 gen_;
};

enum StreamId : std::uint64_t { kSites = 0, kLifetimes = 1, kMissing = 2, kEffects = 3, kResidual = 9 };

struct Variety {
  std::string label;
  Index first_year;
  Index last_year;
};

Index to_count(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw Error(ErrorKind::ConfigInvalid, key + "='" + value + "' is not an integer");
  return static_cast<Index>(v);
}

double to_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw Error(ErrorKind::ConfigInvalid, key + "='" + value + "' is not a number");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const Factor& find_factor(const MixedModelDataset& d, const std::string& name) {
  for (const auto& f : d.random_factors) {
    if (f.name == name) return f;
  }
  throw Error(ErrorKind::ConfigInvalid, "dataset has no random factor '" + name + "'");
}

}  // namespace

void TrialConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigInvalid, m); };
  if (years < 1) fail("years must be >= 1");
  if (centers < 1) fail("centers must be >= 1");
  if (!(centers_per_year_fraction > 0.0 && centers_per_year_fraction <= 1.0)) {
    fail("centers_per_year_fraction must be in (0,1]");
  }
  if (control_varieties < 1) fail("control_varieties must be >= 1");
  if (new_varieties_per_year < 0) fail("new_varieties_per_year must be >= 0");
  if (!(mean_persistence >= 1.0) || !std::isfinite(mean_persistence)) fail("mean_persistence must be >= 1");
  if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) fail("missing_fraction must be in [0,1)");
  for (double v : variance_components) {
    if (!(v > 0.0) || !std::isfinite(v)) fail("variance components must be positive");
  }
  if (!std::isfinite(grand_mean)) fail("grand_mean must be finite");
}

TrialConfig TrialConfig::preset(const std::string& name) {
  struct Row {
    const char* name;
    Index years, centers, per_year, controls, new_per_year;
  };
  // Derived from the year / center / y.c / variety / c.v columns of the
  // benchmark table: per_year = y.c / year, new = (variety - c.v) / year.
  static constexpr Row rows[] = {
      {"prob1", 12, 22, 11, 10, 10},  {"prob2", 15, 25, 12, 10, 10},  {"prob3", 22, 25, 12, 12, 8},
      {"prob4", 25, 25, 12, 12, 10},  {"prob5", 25, 25, 12, 15, 15},  {"prob6", 25, 35, 17, 15, 15},
      {"prob7", 30, 35, 17, 20, 15},  {"prob8", 30, 35, 17, 20, 20},  {"prob9", 35, 40, 20, 20, 20},
      {"prob10", 40, 50, 25, 20, 20},
  };
  for (const auto& r : rows) {
    if (name != r.name) continue;
    TrialConfig c;
    c.years = r.years;
    c.centers = r.centers;
    c.centers_per_year_fraction = static_cast<double>(r.per_year) / static_cast<double>(r.centers);
    c.control_varieties = r.controls;
    c.new_varieties_per_year = r.new_per_year;
    c.mean_persistence = 6.0;
    c.missing_fraction = 0.1;
    return c;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown preset '" + name + "'");
}

void TrialConfig::set(const std::string& key, const std::string& value) {
  if (key == "years") {
    years = to_count(key, value);
  } else if (key == "centers") {
    centers = to_count(key, value);
  } else if (key == "centers_per_year_fraction" || key == "fraction") {
    centers_per_year_fraction = to_real(key, value);
  } else if (key == "control_varieties" || key == "controls") {
    control_varieties = to_count(key, value);
  } else if (key == "new_varieties_per_year" || key == "new") {
    new_varieties_per_year = to_count(key, value);
  } else if (key == "mean_persistence" || key == "persistence") {
    mean_persistence = to_real(key, value);
  } else if (key == "missing_fraction" || key == "missing") {
    missing_fraction = to_real(key, value);
  } else if (key == "grand_mean") {
    grand_mean = to_real(key, value);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(to_count(key, value));
  } else if (key == "variance_components") {
    std::stringstream ss(value);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
      if (k == kRandomTerms) throw Error(ErrorKind::ConfigInvalid, "too many variance components");
      variance_components[k++] = to_real(key, trim(item));
    }
    if (k != kRandomTerms) throw Error(ErrorKind::ConfigInvalid, "expected 6 variance components");
  } else {
    for (std::size_t k = 0; k < kRandomTerms; ++k) {
      if (key == std::string("vc.") + kTrialTermNames[k]) {
        variance_components[k] = to_real(key, value);
        return;
      }
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown setting '" + key + "'");
  }
}

TrialConfig TrialConfig::parse(std::istream& in, TrialConfig base) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigInvalid, "expected key=value, got '" + line + "'");
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

TrialConfig TrialConfig::parse(std::istream& in) { return parse(in, TrialConfig{}); }

MixedModelDataset generate(const TrialConfig& config) {
  config.validate();
  const Index years = config.years;
  const Index per_year = std::clamp<Index>(
      static_cast<Index>(std::ceil(config.centers_per_year_fraction * static_cast<double>(config.centers) - 1e-9)),
      1, config.centers);

  Stream sites(config.seed, kSites);
  std::vector<std::vector<Index>> year_centers(uz(years));
  std::vector<Index> pool(uz(config.centers));
  for (Index y = 0; y < years; ++y) {
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index k = 0; k < per_year; ++k) {  // partial Fisher-Yates
      const Index pick = k + sites.below(config.centers - k);
      std::swap(pool[uz(k)], pool[uz(pick)]);
    }
    year_centers[uz(y)].assign(pool.begin(), pool.begin() + per_year);
    std::sort(year_centers[uz(y)].begin(), year_centers[uz(y)].end());
  }

  Stream lifetimes(config.seed, kLifetimes);
  std::vector<Variety> varieties;
  for (Index c = 0; c < config.control_varieties; ++c) {
    varieties.push_back({"C" + std::to_string(c + 1), 0, years - 1});
  }
  for (Index y = 0; y < years; ++y) {
    for (Index t = 0; t < config.new_varieties_per_year; ++t) {
      const Index life = 1 + lifetimes.poisson(config.mean_persistence - 1.0);
      varieties.push_back({"T" + std::to_string(y + 1) + "." + std::to_string(t + 1), y,
                           std::min(y + life - 1, years - 1)});
    }
  }

  Stream missing(config.seed, kMissing);
  std::array<std::vector<std::string>, TrialConfig::kRandomTerms> labels;
  for (Index y = 0; y < years; ++y) {
    const std::string yl = "Y" + std::to_string(y + 1);
    for (Index c : year_centers[uz(y)]) {
      const std::string cl = "S" + std::to_string(c + 1);
      for (const auto& v : varieties) {
        if (y < v.first_year || y > v.last_year) continue;
        if (missing.uniform() < config.missing_fraction) continue;
        labels[0].push_back(yl);
        labels[1].push_back(cl);
        labels[2].push_back(v.label);
        labels[3].push_back(yl + ":" + cl);
        labels[4].push_back(yl + ":" + v.label);
        labels[5].push_back(v.label + ":" + cl);
      }
    }
  }
  const Index n = static_cast<Index>(labels[0].size());
  if (n == 0) throw Error(ErrorKind::ConfigInvalid, "configuration produced no observations");

  std::vector<Factor> random;
  for (std::size_t f = 0; f < TrialConfig::kRandomTerms; ++f) {
    random.push_back(Factor::from_labels(kTrialTermNames[f], labels[f]));
  }

  std::vector<double> y(uz(n), config.grand_mean);
  for (std::size_t f = 0; f < random.size(); ++f) {
    Stream effects(config.seed, kEffects + f);
    const double sd = std::sqrt(config.variance_components[f]);
    std::vector<double> u(uz(random[f].levels()));
    for (double& e : u) e = sd * effects.normal();
    for (Index o = 0; o < n; ++o) y[uz(o)] += u[uz(random[f].level[uz(o)])];
  }
  Stream residual(config.seed, kResidual);
  for (double& v : y) v += residual.normal();

  return make_dataset(std::move(y), {}, std::move(random));
}

DesignSummary design_summary(const MixedModelDataset& d) {
  const Factor& year = find_factor(d, "year");
  const Factor& variety = find_factor(d, "variety");
  DesignSummary s;
  s.years = year.levels();
  s.centers = find_factor(d, "center").levels();
  s.varieties = variety.levels();
  s.year_center = find_factor(d, "year.center").levels();
  s.year_variety = find_factor(d, "year.variety").levels();
  s.variety_center = find_factor(d, "variety.center").levels();
  s.units = d.n_obs();
  if (s.years > 0) s.varieties_per_year = static_cast<double>(s.year_variety) / static_cast<double>(s.years);
  if (s.varieties > 0) {
    s.years_per_variety = static_cast<double>(s.year_variety) / static_cast<double>(s.varieties);
  }
  std::vector<std::vector<char>> seen(uz(s.varieties), std::vector<char>(uz(s.years), 0));
  for (Index o = 0; o < d.n_obs(); ++o) {
    seen[uz(variety.level[uz(o)])][uz(year.level[uz(o)])] = 1;
  }
  for (const auto& row : seen) {
    if (std::all_of(row.begin(), row.end(), [](char c) { return c != 0; })) ++s.controls;
  }
  s.effects = d.p() + d.b();
  return s;
}

void print_summary_table(std::ostream& out, const std::string& label, const DesignSummary& s) {
  const auto flags = out.flags();
  out << std::left << std::setw(10) << "DataSet" << std::right;
  for (const char* h : {"year", "center", "variety", "y.c", "y.v", "v.c", "units", "v/y", "y/v", "c.v"}) {
    out << std::setw(8) << h;
  }
  out << '\n' << std::left << std::setw(10) << label << std::right;
  for (Index v : {s.years, s.centers, s.varieties, s.year_center, s.year_variety, s.variety_center, s.units}) {
    out << std::setw(8) << v;
  }
  out << std::fixed << std::setprecision(1) << std::setw(8) << s.varieties_per_year << std::setw(8)
      << s.years_per_variety << std::setw(8) << s.controls << '\n';
  out.flags(flags);
}

}  // namespace seldet
