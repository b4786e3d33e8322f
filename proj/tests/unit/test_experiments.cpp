#include <doctest.h>

#include <sstream>

#include "gfd/benchmark_models.hpp"
#include "gfd/config.hpp"
#include "gfd/experiments.hpp"
#include "oracles.hpp"

namespace {

gfd::SweepRow row(double lambda, double extinction, double mc_lo, double mc_hi) {
  gfd::SweepRow r;
  r.S = 1.0;
  r.D = 1.0;
  r.lambda = lambda;
  r.extinction_x0 = extinction;
  gfd::SurvivalEstimate est;
  est.ci = {mc_lo, mc_hi};
  est.estimate = 0.5 * (mc_lo + mc_hi);
  r.survival = est;
  return r;
}

gfd::RunConfig small(gfd::RunConfig cfg, std::size_t grid, std::size_t trials) {
  cfg.solver.grid = grid;
  cfg.sim.trials = trials;
  return cfg;
}

std::string csv(const gfd::SweepResult& sweep) {
  std::ostringstream out;
  gfd::write_sweep_csv(out, sweep);
  return out.str();
}

}  // namespace

TEST_CASE("consistency rule") {
  const auto report = gfd::check_consistency(
      {
          row(1.0, 0.5, 0.49, 0.51),     // supercritical, both survive
          row(-1.0, 1.0, 0.0, 0.0004),   // subcritical, both extinct
          row(5e-5, 0.99, 0.0, 0.02),    // boundary
          row(0.3, 1.0, 0.1, 0.2),       // deterministic survival missing
          row(-0.3, 1.0, 0.05, 0.07),    // Monte Carlo survives
          row(0.3, 0.5, 0.0, 0.01),      // Monte Carlo interval touches 0
      },
      1e-4, 1e-4);
  REQUIRE(report.rows.size() == 6);
  CHECK(report.rows[0].verdict == gfd::Verdict::pass);
  CHECK(report.rows[1].verdict == gfd::Verdict::pass);
  CHECK(report.rows[2].verdict == gfd::Verdict::inconclusive);
  CHECK(report.rows[3].verdict == gfd::Verdict::fail);
  CHECK(report.rows[4].verdict == gfd::Verdict::fail);
  CHECK(report.rows[5].verdict == gfd::Verdict::fail);
  CHECK(report.failures() == 3);
  CHECK(report.inconclusive() == 1);
  CHECK(gfd::to_string(gfd::Verdict::inconclusive) == "INCONCLUSIVE");
}

TEST_CASE("single-cell sweep on the constant-rate model") {
  const auto cfg = small(gfd::constant_rate_config(2.0, 1.0), 64, 400);
  const auto sweep = gfd::run_sweep(cfg, {});
  REQUIRE(sweep.rows.size() == 1);
  const auto& r = sweep.rows[0];
  CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.extinction_x0 == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(r.survival);
  CHECK(r.survival->trials == 400);
  CHECK(r.converged());

  const auto text = csv(sweep);
  CHECK(text.rfind("# gfd sweep config_hash=" + gfd::config_hash(cfg), 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  const auto consistency = gfd::check_consistency(sweep.rows, 1e-4, 1e-4);
  CHECK(consistency.rows[0].verdict == gfd::Verdict::pass);

  const auto mono = gfd::check_monotonicity(sweep, {});
  CHECK(mono.passed());
  for (const auto& c : mono.claims)
    if (oracle::contains(c.label, "resource S")) CHECK(c.comparisons == 0);
  CHECK(gfd::sweep_exit_code(sweep, consistency, mono) == 0);
}

TEST_CASE("subcritical constant rates are consistent") {
  const auto cfg = small(gfd::constant_rate_config(1.0, 2.0), 64, 400);
  const auto sweep = gfd::run_sweep(cfg, {});
  CHECK(sweep.rows[0].lambda == doctest::Approx(-1.0).epsilon(1e-9));
  const auto consistency = gfd::check_consistency(sweep.rows, 1e-4, 1e-4);
  CHECK(consistency.rows[0].verdict == gfd::Verdict::pass);
}

TEST_CASE("deterministic sweep on a reduced benchmark ladder") {
  auto cfg = small(gfd::logramp_config(), 128, 0);
  cfg.env.resource = {0.5, 2.0, 8.0};
  cfg.env.death = {0.3, 1.0};
  gfd::SweepOptions options;
  options.monte_carlo = false;
  const auto sweep = gfd::run_sweep(cfg, options);
  REQUIRE(sweep.rows.size() == 6);
  CHECK(sweep.row(2, 1).S == 8.0);
  CHECK(sweep.row(2, 1).D == 1.0);
  CHECK(sweep.profile(1, 0).S == 2.0);
  for (std::size_t d = 0; d < 2; ++d)
    for (std::size_t s = 0; s + 1 < 3; ++s) CHECK(sweep.row(s, d).lambda <= sweep.row(s + 1, d).lambda);
  const auto mono = gfd::check_monotonicity(sweep, {});
  for (const auto& c : mono.claims) {
    CHECK(c.asserted);
    CHECK_MESSAGE(c.passed, c.label);
  }
  CHECK(csv(sweep) == csv(gfd::run_sweep(cfg, options)));
}

TEST_CASE("claims are informational when the hypotheses fail") {
  auto named = gfd::find_builtin("DECREASING");
  REQUIRE(named);
  auto cfg = small(named->config, 64, 0);
  cfg.env.resource = {1.0, 4.0};
  cfg.env.death = {0.3};
  gfd::SweepOptions options;
  options.monte_carlo = false;
  const auto sweep = gfd::run_sweep(cfg, options);
  const auto mono = gfd::check_monotonicity(sweep, {});
  for (const auto& c : mono.claims) {
    if (oracle::contains(c.label, "initial mass") || oracle::contains(c.label, "resource S"))
      CHECK_FALSE(c.asserted);
  }
  CHECK(mono.passed());

  std::ostringstream report;
  gfd::write_report(report, sweep, gfd::check_consistency(sweep.rows, 1e-4, 1e-4), mono);
  CHECK(oracle::contains(report.str(), "[informational: hypotheses not validated]"));
}

TEST_CASE("unconverged cells give a nonzero exit code") {
  auto cfg = small(gfd::logramp_config(), 64, 0);
  cfg.env.resource = {2.0};
  cfg.env.death = {0.6};
  cfg.solver.max_generations = 2;
  gfd::SweepOptions options;
  options.monte_carlo = false;
  const auto sweep = gfd::run_sweep(cfg, options);
  CHECK_FALSE(sweep.rows[0].converged());
  const auto consistency = gfd::check_consistency(sweep.rows, 1e-4, 1e-4);
  const auto mono = gfd::check_monotonicity(sweep, {});
  CHECK(gfd::sweep_exit_code(sweep, consistency, mono) == 1);
  CHECK(oracle::contains(csv(sweep), "UNCONVERGED"));
}
