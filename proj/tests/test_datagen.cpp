#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "seldet/datagen.hpp"
#include "seldet/error.hpp"
#include "seldet/reml.hpp"

using namespace seldet;

namespace {

std::string serialize(const MixedModelDataset& d) {
  std::ostringstream s;
  write_dataset(d, s);
  return s.str();
}

const Factor& factor(const MixedModelDataset& d, const std::string& name) {
  for (const auto& f : d.random_factors) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("missing factor " + name);
}

}  // namespace

TEST(Generate, DegenerateConfig) {
  const auto d = generate(TrialConfig{});
  EXPECT_EQ(d.n_obs(), 1);
  EXPECT_EQ(d.p(), 1);
  ASSERT_EQ(d.random_factors.size(), 6u);
  for (const auto& f : d.random_factors) EXPECT_EQ(f.levels(), 1);
  const auto s = design_summary(d);
  for (Index c : {s.years, s.centers, s.varieties, s.year_center, s.year_variety, s.variety_center, s.units}) {
    EXPECT_EQ(c, 1);
  }
  EXPECT_EQ(s.controls, 1);
  EXPECT_EQ(s.effects, 7);
}

TEST(Generate, DeterministicForSeed) {
  auto c = TrialConfig::preset("prob1");
  c.seed = 42;
  EXPECT_EQ(serialize(generate(c)), serialize(generate(c)));
  c.seed = 43;
  const auto other = serialize(generate(c));
  c.seed = 42;
  EXPECT_NE(serialize(generate(c)), other);
}

TEST(Generate, StreamsAreIndependent) {
  // Changing the missing fraction leaves variety lifetimes untouched.
  auto c = TrialConfig::preset("prob1");
  c.missing_fraction = 0.0;
  const auto full = design_summary(generate(c));
  c.missing_fraction = 0.3;
  const auto thinned = design_summary(generate(c));
  EXPECT_LE(thinned.units, full.units);
  EXPECT_EQ(full.units, full.year_variety * 11);  // every cell of 11 centers a year
  EXPECT_GE(full.varieties, thinned.varieties);
}

TEST(Generate, Prob1Scale) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto c = TrialConfig::preset("prob1");
    c.seed = seed;
    const auto d = generate(c);
    const auto s = design_summary(d);
    EXPECT_EQ(s.years, 12);
    EXPECT_EQ(s.centers, 22);
    EXPECT_NEAR(static_cast<double>(s.effects), 3488.0, 0.15 * 3488.0);
    EXPECT_NEAR(static_cast<double>(s.units), 6667.0, 0.15 * 6667.0);
    EXPECT_NEAR(static_cast<double>(s.year_center), 132.0, 0.15 * 132.0);
    EXPECT_NEAR(static_cast<double>(s.varieties), 130.0, 0.15 * 130.0);
    EXPECT_NEAR(static_cast<double>(s.year_variety), 673.0, 0.15 * 673.0);
    EXPECT_NEAR(static_cast<double>(s.variety_center), 2518.0, 0.15 * 2518.0);
    EXPECT_GE(s.controls, 10);
    EXPECT_EQ(MmeAssembler(d).dimension(), s.effects);
  }
}

TEST(Generate, StructuralBoundsAndNoPhantomLevels) {
  for (int p = 1; p <= 4; ++p) {
    auto c = TrialConfig::preset("prob" + std::to_string(p));
    c.seed = static_cast<std::uint64_t>(p);
    const auto d = generate(c);
    const auto s = design_summary(d);
    EXPECT_LE(s.year_center, s.years * s.centers);
    EXPECT_LE(s.year_variety, s.years * s.varieties);
    EXPECT_LE(s.units, s.year_center * s.varieties);
    EXPECT_EQ(d.p() + d.b(), s.effects);
    for (const auto& f : d.random_factors) {
      std::vector<int> used(static_cast<std::size_t>(f.levels()), 0);
      for (Index l : f.level) used[static_cast<std::size_t>(l)] = 1;
      for (int u : used) EXPECT_EQ(u, 1) << f.name;
    }
  }
}

TEST(Generate, OneObservationPerCell) {
  auto c = TrialConfig::preset("prob1");
  const auto d = generate(c);
  const auto& y = factor(d, "year");
  const auto& ce = factor(d, "center");
  const auto& v = factor(d, "variety");
  std::set<std::tuple<Index, Index, Index>> cells;
  for (Index o = 0; o < d.n_obs(); ++o) {
    const auto u = static_cast<std::size_t>(o);
    EXPECT_TRUE(cells.insert({y.level[u], ce.level[u], v.level[u]}).second);
  }
}

TEST(Generate, CentersPerYear) {
  auto c = TrialConfig::preset("prob2");
  c.missing_fraction = 0.0;
  const auto d = generate(c);
  const auto& y = factor(d, "year");
  const auto& ce = factor(d, "center");
  std::vector<std::set<Index>> per_year(static_cast<std::size_t>(y.levels()));
  for (Index o = 0; o < d.n_obs(); ++o) {
    per_year[static_cast<std::size_t>(y.level[static_cast<std::size_t>(o)])].insert(
        ce.level[static_cast<std::size_t>(o)]);
  }
  for (const auto& s : per_year) EXPECT_EQ(s.size(), 12u);
}

TEST(Generate, NoObservationsIsAnError) {
  TrialConfig c;
  c.missing_fraction = 0.999;
  c.seed = 5;
  try {
    generate(c);
    SUCCEED();  // a single cell may survive
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
  }
}

TEST(TrialConfig, Validation) {
  auto bad = [](auto mutate) {
    TrialConfig c;
    mutate(c);
    try {
      c.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::ConfigInvalid;
    }
    return false;
  };
  EXPECT_TRUE(bad([](TrialConfig& c) { c.years = 0; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.centers = 0; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.centers_per_year_fraction = 0.0; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.centers_per_year_fraction = 1.5; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.control_varieties = 0; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.new_varieties_per_year = -1; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.mean_persistence = 0.5; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.missing_fraction = 1.0; }));
  EXPECT_TRUE(bad([](TrialConfig& c) { c.variance_components[2] = 0.0; }));
  EXPECT_THROW(TrialConfig::preset("prob11"), Error);
}

TEST(TrialConfig, ParseKeyValue) {
  std::istringstream in(
      "# trial\n"
      "years = 3\n"
      "centers=4\n"
      "fraction = 0.5   # two a year\n"
      "controls=2\nnew=1\npersistence=2\nmissing=0\nseed=9\n"
      "variance_components=1,1,1,1,1,0.5\n"
      "vc.year=3\n");
  const auto c = TrialConfig::parse(in);
  EXPECT_EQ(c.years, 3);
  EXPECT_EQ(c.centers, 4);
  EXPECT_DOUBLE_EQ(c.centers_per_year_fraction, 0.5);
  EXPECT_EQ(c.control_varieties, 2);
  EXPECT_EQ(c.new_varieties_per_year, 1);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_DOUBLE_EQ(c.variance_components[0], 3.0);
  EXPECT_DOUBLE_EQ(c.variance_components[5], 0.5);
  const auto d = generate(c);
  EXPECT_EQ(design_summary(d).year_center, 6);

  std::istringstream bad_key("colour=blue\n");
  EXPECT_THROW(TrialConfig::parse(bad_key), Error);
  std::istringstream bad_val("years=three\n");
  EXPECT_THROW(TrialConfig::parse(bad_val), Error);
  std::istringstream no_eq("years 3\n");
  EXPECT_THROW(TrialConfig::parse(no_eq), Error);
}

TEST(Summary, TableColumnOrder) {
  std::ostringstream out;
  print_summary_table(out, "prob1", design_summary(generate(TrialConfig::preset("prob1"))));
  const std::string header = out.str().substr(0, out.str().find('\n'));
  const std::vector<std::string> cols = {"year", "center", "variety", "y.c", "y.v", "v.c", "units"};
  std::size_t pos = 0;
  for (const auto& c : cols) {
    const auto at = header.find(" " + c, pos);
    ASSERT_NE(at, std::string::npos) << c;
    pos = at + 1;
  }
}

TEST(Summary, RequiresTrialFactors) {
  const auto d = make_dataset({1.0, 2.0}, {}, {Factor::from_labels("g", {"a", "b"})});
  EXPECT_THROW(design_summary(d), Error);
}
