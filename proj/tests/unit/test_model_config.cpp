#include <doctest.h>

#include <algorithm>
#include <string>

#include "gfd/assumptions.hpp"
#include "gfd/benchmark_models.hpp"
#include "gfd/config.hpp"
#include "oracles.hpp"

using oracle::contains;

namespace {

const char* kMinimal = R"(
[model]
max_mass = 1
death_rate = 0.5

[division]
family = constant
b_max = 1
m_div = 0

[kernel]
family = uniform
l = 0.25

[environment]
S = 1
D = 0.5
)";

std::string with_line(const std::string& section, const std::string& line) {
  std::string text = kMinimal;
  const auto at = text.find("[" + section + "]");
  const auto eol = text.find('\n', at);
  text.insert(eol + 1, line + "\n");
  return text;
}

std::string config_error(const std::string& text) {
  try {
    gfd::parse_config(text);
  } catch (const gfd::ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config fills the model fields") {
  const auto loaded = gfd::parse_config(kMinimal);
  const auto& m = loaded.config.model;
  CHECK(m.max_mass == 1.0);
  CHECK(m.death_rate == 0.5);
  CHECK(m.division.params().family == gfd::DivisionFamily::constant);
  CHECK(m.division.params().b_max == 1.0);
  CHECK(m.division.m_div() == 0.0);
  CHECK(m.kernel.family() == gfd::KernelFamily::uniform);
  CHECK(m.kernel.cutoff(0.3) == 0.25);
  CHECK(loaded.config.env.resource == std::vector<double>{1.0});
  CHECK(loaded.config.env.death == std::vector<double>{0.5});
  CHECK(loaded.config.x0 == 0.5);
}

TEST_CASE("omitted gamma defaults to 1 and is echoed") {
  const auto loaded = gfd::parse_config(kMinimal);
  CHECK(loaded.config.model.division.params().gamma == 1.0);
  const bool echoed = std::any_of(loaded.log.begin(), loaded.log.end(), [](const std::string& line) {
    return contains(line, "division.gamma = 1") && contains(line, "(default)");
  });
  CHECK(echoed);
}

TEST_CASE("config errors") {
  std::string text = kMinimal;
  text.replace(text.find("m_div = 0"), 9, "m_div = 1.5");
  CHECK(contains(config_error(text), "m_div must lie in [0,M)"));

  CHECK(contains(config_error(with_line("kernel", "width = 3")), "unknown key kernel.width"));
  CHECK(contains(config_error(with_line("division", "b_max = 2")), "duplicate key"));
  CHECK(contains(config_error(std::string(kMinimal) + "[extra]\n"), "unknown section"));

  std::string bad_family = kMinimal;
  bad_family.replace(bad_family.find("family = uniform"), 16, "family = cauchy");
  CHECK(contains(config_error(bad_family), "unknown kernel family"));

  std::string missing = kMinimal;
  missing.erase(missing.find("death_rate = 0.5"), 16);
  CHECK(contains(config_error(missing), "missing required key model.death_rate"));

  std::string unsorted = kMinimal;
  unsorted.replace(unsorted.find("S = 1"), 5, "S = 2, 1");
  CHECK_FALSE(config_error(unsorted).empty());

  CHECK_THROWS_AS(gfd::load_config("/nonexistent/gfd.ini"), gfd::ConfigError);
  CHECK_THROWS_AS(gfd::load_config("builtin:NOPE"), gfd::ConfigError);
}

TEST_CASE("write_config round-trips") {
  for (const auto& name : gfd::builtin_names()) {
    const auto cfg = gfd::load_config("builtin:" + name).config;
    const auto text = gfd::write_config(cfg);
    const auto again = gfd::parse_config(text).config;
    CHECK(gfd::write_config(again) == text);
    CHECK(gfd::config_hash(again) == gfd::config_hash(cfg));
  }
  auto a = gfd::logramp_config();
  auto b = a;
  b.sim.seed += 1;
  CHECK(gfd::config_hash(a) != gfd::config_hash(b));
}

TEST_CASE("separable table growth parses and is used") {
  std::string table = kMinimal;
  table.insert(table.find("[division]"),
               "[growth]\nfamily = separable_table\nmu_s = 0, 1, 10\nmu_values = 0, 1, 2\n"
               "shape_x = 0, 0.5, 1\nshape_values = 0, 0.25, 0\n\n");
  const auto cfg = gfd::parse_config(table).config;
  CHECK(cfg.model.growth.params().family == gfd::GrowthFamily::separable_table);
  CHECK(cfg.model.g(1.0, 0.5) == doctest::Approx(0.25));
  CHECK(cfg.model.g(5.5, 0.25) == doctest::Approx(1.5 * 0.125));
  CHECK(cfg.model.g(1.0, 0.0) == 0.0);
  CHECK(cfg.model.g(1.0, 1.0) == 0.0);
}

TEST_CASE("assumptions hold for constant rate, logistic growth, uniform kernel") {
  const auto cfg = gfd::parse_config(kMinimal).config;
  const auto report = gfd::validate_assumptions(cfg.model, cfg.env, 64, 64);
  CHECK(report.all_passed());
  CHECK(report.standing());
  CHECK(report.mass_ordering());
  CHECK(report.empirical_q_bar == doctest::Approx(2.0));
}

TEST_CASE("assumptions on the benchmark model") {
  const auto cfg = gfd::logramp_config();
  const auto report = gfd::validate_assumptions(cfg.model, cfg.env, 64, 64);
  CHECK(report.all_passed());
  CHECK(report.resource_ordering());
  CHECK(report.death_ordering());
}

TEST_CASE("division rate decreasing in x is flagged") {
  const auto named = gfd::find_builtin("DECREASING");
  REQUIRE(named);
  const auto report = gfd::validate_assumptions(named->config.model, named->config.env, 64, 64);
  CHECK_FALSE(report.division_monotone_x);
  CHECK_FALSE(report.mass_ordering());
  CHECK_FALSE(report.resource_ordering());
  CHECK(contains(report.render(), "FAIL  division rate non-decreasing in x"));
}

TEST_CASE("asymmetric kernel fails the symmetry check") {
  const auto named = gfd::find_builtin("ASYMMETRIC");
  REQUIRE(named);
  const auto report = gfd::validate_assumptions(named->config.model, named->config.env, 64, 64);
  CHECK_FALSE(report.kernel_ok);
  CHECK_FALSE(report.standing());
  CHECK(contains(report.render(), "FAIL  kernel symmetric"));
}

TEST_CASE("validation probe grids must have at least 16 points") {
  const auto cfg = gfd::parse_config(kMinimal).config;
  CHECK_THROWS_AS(gfd::validate_assumptions(cfg.model, cfg.env, 8, 64), std::invalid_argument);
}
