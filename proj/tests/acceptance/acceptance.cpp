// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: gfd_acceptance [criterion numbers...]   (default: all)
// Runtime limits are stated for four workers and scaled by 4 / min(4, cores).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gfd/assumptions.hpp"
#include "gfd/benchmark_models.hpp"
#include "gfd/experiments.hpp"
#include "gfd/extinction.hpp"
#include "gfd/format.hpp"
#include "gfd/kernel.hpp"
#include "gfd/random.hpp"
#include "gfd/simulator.hpp"
#include "gfd/spectral.hpp"

namespace {

using gfd::format_double;
using Clock = std::chrono::steady_clock;

struct Result {
  bool passed = true;
  std::string detail;
};

std::size_t cores() { return std::max(1u, std::thread::hardware_concurrency()); }

std::size_t workers() { return std::min<std::size_t>(4, cores()); }

double runtime_scale() { return 4.0 / static_cast<double>(workers()); }

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Appends the runtime verdict for a limit stated in seconds.
void runtime_check(Result& r, Clock::time_point start, std::optional<double> limit) {
  const double elapsed = since(start);
  if (!limit) {
    r.detail += "; " + format_double(std::round(elapsed * 10) / 10) + " s";
    return;
  }
  const double scaled = *limit * runtime_scale();
  const bool ok = elapsed < scaled;
  r.passed = r.passed && ok;
  r.detail += "; " + format_double(std::round(elapsed * 10) / 10) + " s of " + format_double(scaled) + " s" +
              (ok ? "" : " (too slow)");
}

gfd::SolverSettings solver(std::size_t grid) {
  gfd::SolverSettings s;
  s.grid = grid;
  return s;
}

gfd::SimulationLimits limits_of(const gfd::RunConfig& cfg) {
  return {cfg.sim.gen_limit, cfg.sim.pop_cap, cfg.sim.time_horizon};
}

// The full benchmark sweep is shared by the ordering, residual and
// agreement criteria.
const gfd::SweepResult& benchmark_sweep() {
  static const gfd::SweepResult sweep = [] {
    gfd::SweepOptions options;
    options.threads = workers();
    return gfd::run_sweep(gfd::logramp_config(), options);
  }();
  return sweep;
}

double benchmark_seconds = 0.0;

const gfd::SweepResult& timed_benchmark_sweep() {
  static bool ran = false;
  if (!ran) {
    const auto start = Clock::now();
    benchmark_sweep();
    benchmark_seconds = since(start);
    ran = true;
  }
  return benchmark_sweep();
}

Result galton_watson() {
  const auto start = Clock::now();
  const auto named = gfd::find_builtin("CONSTANT");
  const auto& cfg = named->config;
  const double b = cfg.model.division.params().b_max;
  const double D = cfg.env.death.front();
  const double q = gfd::gw_extinction_oracle(b, D);

  const auto prof = gfd::solve_extinction(cfg.model, cfg.env.resource.front(), D, solver(512));
  double worst = 0.0;
  for (double p : prof.p) worst = std::max(worst, std::abs(p - q));

  const gfd::BranchingSimulator sim(cfg.model, cfg.env.resource.front(), D);
  const auto est = gfd::estimate_survival(sim, cfg.x0, 40000, limits_of(cfg), cfg.sim.seed, workers());
  const bool covered = est.ci.lo <= 1.0 - q && 1.0 - q <= est.ci.hi;

  Result r;
  r.passed = prof.converged && worst <= 1e-3 && covered;
  r.detail = "sup|p - " + format_double(q) + "| = " + format_double(worst) + ", survival " +
             format_double(est.estimate) + " CI [" + format_double(est.ci.lo) + ", " + format_double(est.ci.hi) +
             "] vs " + format_double(1.0 - q);
  runtime_check(r, start, 60.0);
  return r;
}

Result mass_balance() {
  const auto start = Clock::now();
  const auto named = gfd::find_builtin("CONSTANT");
  const auto& cfg = named->config;
  const double D = cfg.env.death.front();
  const double expected = gfd::mass_balance_lambda_oracle(cfg.model.division.params().b_max, D);
  const auto sol = gfd::principal_eigenpair(cfg.model, cfg.env.resource.front(), D, solver(512));
  Result r;
  const double err = std::abs(sol.lambda - expected);
  r.passed = sol.converged && err <= 1e-3;
  r.detail = "lambda = " + format_double(sol.lambda) + " vs " + format_double(expected) + ", error " +
             format_double(err);
  runtime_check(r, start, 30.0);
  return r;
}

Result shift_identity() {
  const auto start = Clock::now();
  const auto cfg = gfd::logramp_config();
  const double D = cfg.env.death.front();
  double worst = 0.0;
  bool converged = true;
  for (double S : cfg.env.resource) {
    const auto base = gfd::principal_eigenpair(cfg.model, S, D, solver(512));
    converged = converged && base.converged;
    for (double delta : {0.1, 1.0}) {
      const auto shifted = gfd::principal_eigenpair(cfg.model, S, D + delta, solver(512));
      converged = converged && shifted.converged;
      worst = std::max(worst, std::abs(shifted.lambda - (base.lambda - delta)));
    }
  }
  Result r;
  r.passed = converged && worst <= 1e-12;
  r.detail = "max |lambda(D + delta) - lambda(D) + delta| = " + format_double(worst) + " over " +
             std::to_string(cfg.env.resource.size()) + " S values";
  runtime_check(r, start, 30.0);
  return r;
}

Result sign_equivalence() {
  const auto start = Clock::now();
  const auto named = gfd::find_builtin("CONSTANT_RATIOS");
  const auto& cfg = named->config;
  gfd::SweepOptions options;
  options.threads = workers();
  const auto sweep = gfd::run_sweep(cfg, options);
  const auto report = gfd::check_consistency(sweep.rows, cfg.solver.epsilon_lambda, cfg.solver.epsilon_p);
  std::size_t pass = 0, boundary_ok = 0, boundary = 0;
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const bool on_boundary = std::abs(sweep.rows[k].lambda) <= cfg.solver.epsilon_lambda;
    if (on_boundary) {
      ++boundary;
      if (report.rows[k].verdict == gfd::Verdict::inconclusive) ++boundary_ok;
    } else if (report.rows[k].verdict == gfd::Verdict::pass) {
      ++pass;
    }
  }
  Result r;
  r.passed = report.failures() == 0 && pass + boundary == report.rows.size() && boundary_ok == boundary;
  std::ostringstream d;
  d << pass << " of " << report.rows.size() - boundary << " non-boundary rows PASS, " << boundary_ok << " of "
    << boundary << " boundary rows INCONCLUSIVE";
  for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
    const auto& row = sweep.rows[k];
    d << "; b/D=" << format_double(std::round(1000 * cfg.model.division.params().b_max / row.D) / 1000)
      << " lambda=" << format_double(row.lambda) << " " << gfd::to_string(report.rows[k].verdict);
  }
  r.detail = d.str();
  runtime_check(r, start, 120.0);
  return r;
}

const gfd::Claim* find_claim(const gfd::MonotonicityReport& report, const std::string& needle) {
  for (const auto& c : report.claims)
    if (c.label.find(needle) != std::string::npos) return &c;
  return nullptr;
}

Result monotonicity_suite() {
  const auto& sweep = timed_benchmark_sweep();
  const auto mono = gfd::check_monotonicity(sweep, {});
  Result r;
  std::ostringstream d;
  for (const char* needle : {"non-increasing in initial mass", "non-decreasing in death rate",
                             "non-increasing in resource S", "eigenvalue non-decreasing in resource S",
                             "Monte Carlo survival non-decreasing in S"}) {
    const auto* c = find_claim(mono, needle);
    const bool ok = c != nullptr && c->asserted && c->passed;
    r.passed = r.passed && ok;
    d << (ok ? "ok " : "FAILED ") << needle;
    if (c != nullptr) d << " (worst " << format_double(c->worst) << ")";
    d << "; ";
  }
  std::size_t unconverged = 0;
  for (const auto& row : sweep.rows) unconverged += row.converged() ? 0 : 1;
  r.passed = r.passed && unconverged == 0;
  d << unconverged << " unconverged cells; " << workers() << " workers, " << format_double(std::round(benchmark_seconds * 10) / 10)
    << " s of " << format_double(600.0 * runtime_scale()) << " s";
  r.passed = r.passed && benchmark_seconds < 600.0 * runtime_scale();
  r.detail = d.str();
  return r;
}

Result fixed_point_residual() {
  const auto start = Clock::now();
  const auto& sweep = timed_benchmark_sweep();
  const auto cfg = sweep.config;
  double worst = 0.0;
  std::string worst_cell;
  double worst_order = std::numeric_limits<double>::infinity();
  std::string order_cell;
  std::size_t too_large = 0, too_slow = 0;
  std::vector<double> coarse(sweep.rows.size());
  gfd::parallel_for(sweep.rows.size(), workers(), [&](std::size_t k) {
    const auto& row = sweep.rows[k];
    coarse[k] = gfd::fixed_point_residual(gfd::solve_extinction(cfg.model, row.S, row.D, solver(256)), cfg.model);
  });
  for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
    const auto& row = sweep.rows[k];
    const std::string cell = "S=" + format_double(row.S) + " D=" + format_double(row.D);
    const double fine = row.fixed_point_residual;
    if (fine > worst) {
      worst = fine;
      worst_cell = cell;
    }
    if (!(fine < 1e-3)) ++too_large;
    const double order = std::log2(coarse[k] / fine);
    if (order < worst_order) {
      worst_order = order;
      order_cell = cell;
    }
    if (!(order >= 1.0)) ++too_slow;
  }
  Result r;
  r.passed = too_large == 0 && too_slow == 0;
  r.detail = "sup residual " + format_double(worst) + " at " + worst_cell + ", " + std::to_string(too_large) +
             " of " + std::to_string(sweep.rows.size()) + " cells >= 1e-3; observed order min " +
             format_double(worst_order) + " at " + order_cell + ", " + std::to_string(too_slow) +
             " cells below first order";
  runtime_check(r, start, std::nullopt);
  return r;
}

Result monotone_integral_property() {
  const auto start = Clock::now();
  const std::vector<gfd::DivisionKernel> kernels{gfd::DivisionKernel::uniform(1.0, 0.25),
                                                 gfd::DivisionKernel::beta_ramp(1.0, 0.25, 5.0)};
  const std::vector<std::pair<std::string, std::function<double(double)>>> functions{
      {"1 - z", [](double z) { return 1.0 - z; }},
      {"exp(-3z)", [](double z) { return std::exp(-3.0 * z); }},
      {"step at 0.3", [](double z) { return z < 0.3 ? 1.0 : 0.2; }},
      {"1/(1 + 5 z^2)", [](double z) { return 1.0 / (1.0 + 5.0 * z * z); }},
  };
  const std::size_t n = 256;
  const gfd::MassGrid grid(1.0, n);
  std::vector<double> knots(grid.nodes().begin(), grid.nodes().end());
  double worst = 0.0;
  std::string where = "none";
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    for (const auto& [name, f] : functions) {
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = f(knots[i]);
      const gfd::MonotoneTable table(knots, values);
      double prev = gfd::monotone_integral(kernels[k], table, knots[0]);
      for (std::size_t i = 1; i < n; ++i) {
        const double cur = gfd::monotone_integral(kernels[k], table, knots[i]);
        if (cur - prev > worst) {
          worst = cur - prev;
          where = gfd::to_string(kernels[k].family()) + " f=" + name + " x=" + format_double(knots[i]);
        }
        prev = cur;
      }
    }
  }
  Result r;
  r.passed = worst <= 1e-10;
  r.detail = "largest increase " + format_double(worst) + " (" + where + "), 4 functions x 2 kernels x " +
             std::to_string(n) + " points";
  runtime_check(r, start, std::nullopt);
  return r;
}

std::vector<double> interior(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return out;
}

Result coupling_validator() {
  const auto start = Clock::now();
  const auto xs = interior(64);
  const auto us = interior(64);
  const auto uniform = gfd::check_coupling(gfd::DivisionKernel::uniform(1.0, 0.25), xs, us);
  const auto ramp = gfd::check_coupling(gfd::DivisionKernel::beta_ramp(1.0, 0.25, 5.0), xs, us);
  const auto named = gfd::find_builtin("COUPLING_VIOLATION");
  const auto& kernel = named->config.model.kernel;
  const auto violation = gfd::check_coupling(kernel, xs, us);

  Result r;
  std::ostringstream d;
  d << "uniform " << (uniform.passed ? "pass" : "fail") << ", beta ramp " << (ramp.passed ? "pass" : "fail")
    << ", l(x) = " << format_double(kernel.cutoff(0.0)) << " (1 - x) " << (violation.passed ? "pass" : "fail");
  bool triple = false;
  if (violation.first_two_point_violation) {
    const auto& v = *violation.first_two_point_violation;
    // confirm by direct evaluation
    const double fx = kernel.inverse_cdf(v.x, v.u), fy = kernel.inverse_cdf(v.y, v.u);
    triple = v.x < v.y && (v.x * fx > v.y * fy || v.x * (1 - fx) > v.y * (1 - fy));
    d << " at (x, y, u) = (" << format_double(v.x) << ", " << format_double(v.y) << ", " << format_double(v.u)
      << ")";
  }
  r.passed = uniform.passed && ramp.passed && !violation.passed && triple;
  r.detail = d.str();
  runtime_check(r, start, std::nullopt);
  return r;
}

// Closed-form CDF of the power-ramp kernel with constant cutoff l and
// exponent beta.
double ramp_cdf(double u, double l, double beta) {
  auto half = [&](double a) { return a <= l ? 0.0 : 0.5 * std::pow((a - l) / (0.5 - l), beta + 1.0); };
  if (u <= 0.5) return half(u);
  return 1.0 - half(1.0 - u);
}

double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double F = cdf(draws[i]);
    ks = std::max({ks, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return ks;
}

Result kernel_correctness() {
  const auto start = Clock::now();
  const double l = 0.25, beta = 5.0;
  const auto uniform = gfd::DivisionKernel::uniform(1.0, l);
  const auto ramp = gfd::DivisionKernel::beta_ramp(1.0, l, beta);
  const auto vs = interior(64);
  double round_trip = 0.0;
  for (const auto* k : {&uniform, &ramp})
    for (double x : {0.1, 0.5, 0.9})
      for (double v : vs) round_trip = std::max(round_trip, std::abs(k->cdf(x, k->inverse_cdf(x, v)) - v));

  const std::size_t n = 100000;
  const double critical = 1.36 / std::sqrt(static_cast<double>(n));
  std::vector<double> a(n), b(n);
  gfd::RandomStream rng(20240917, 0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    a[i] = uniform.sample(0.5, u);
    b[i] = ramp.sample(0.5, u);
  }
  const double ks_uniform = ks_statistic(a, [&](double u) { return std::clamp((u - l) / (1 - 2 * l), 0.0, 1.0); });
  const double ks_ramp = ks_statistic(b, [&](double u) { return ramp_cdf(u, l, beta); });

  Result r;
  r.passed = round_trip <= 1e-10 && ks_uniform < critical && ks_ramp < critical;
  r.detail = "round-trip error " + format_double(round_trip) + "; KS uniform " + format_double(ks_uniform) +
             ", beta ramp " + format_double(ks_ramp) + " vs 5% critical value " + format_double(critical);
  runtime_check(r, start, std::nullopt);
  return r;
}

Result martingale() {
  const auto start = Clock::now();
  const std::vector<double> checkpoints{0.5, 1.0, 2.0};
  const std::size_t trials = 10000;
  auto run = [&](const gfd::RunConfig& cfg, double S, double D) {
    const auto sol = gfd::principal_eigenpair(cfg.model, S, D, solver(512));
    const gfd::BranchingSimulator sim(cfg.model, S, D);
    return std::pair{sol.converged,
                     gfd::martingale_check(sim, cfg.x0, sol.lambda, sol.v, checkpoints, trials, cfg.sim.pop_cap,
                                           cfg.sim.seed, workers())};
  };
  const auto constant = gfd::find_builtin("CONSTANT")->config;
  const auto [c_ok, c] = run(constant, constant.env.resource.front(), constant.env.death.front());
  const auto bench = gfd::logramp_config();
  const auto [b_ok, b] = run(bench, 2.0, 0.3);

  auto zs = [](const gfd::MartingaleReport& rep) {
    std::string out;
    for (const auto& cp : rep.checkpoints) out += (out.empty() ? "" : ", ") + format_double(std::round(cp.z * 1000) / 1000);
    return out;
  };
  Result r;
  r.passed = c_ok && b_ok && c.max_abs_z() <= 4.0 && b.max_abs_z() <= 4.0 && c.capped == 0 && b.capped == 0;
  r.detail = "constant rates z = [" + zs(c) + "], benchmark S=2 D=0.3 z = [" + zs(b) + "]";
  runtime_check(r, start, 300.0);
  return r;
}

Result cross_description() {
  const auto& sweep = timed_benchmark_sweep();
  double worst = -1.0;
  std::string where;
  std::size_t failures = 0;
  for (const auto& row : sweep.rows) {
    const auto& est = *row.survival;
    const double gap = std::abs(est.estimate - row.deterministic_survival());
    const double margin = gap - (est.half_width() + 2e-3);
    if (margin >= 0.0) ++failures;
    if (margin > worst) {
      worst = margin;
      where = "S=" + format_double(row.S) + " D=" + format_double(row.D) + " (|diff| " + format_double(gap) +
              ", half-width " + format_double(est.half_width()) + ")";
    }
  }
  Result r;
  r.passed = failures == 0;
  r.detail = std::to_string(failures) + " of " + std::to_string(sweep.rows.size()) +
             " cells outside; tightest " + where;
  return r;
}

Result determinism() {
  const auto start = Clock::now();
  auto cfg = gfd::logramp_config();
  cfg.env.resource = {1.0, 8.0};
  cfg.env.death = {0.3, 1.0};
  cfg.solver.grid = 256;
  cfg.sim.trials = 2000;
  auto csv = [&](std::size_t threads) {
    gfd::SweepOptions options;
    options.threads = threads;
    std::ostringstream out;
    gfd::write_sweep_csv(out, gfd::run_sweep(cfg, options));
    return out.str();
  };
  const auto first = csv(1);
  const auto second = csv(std::max<std::size_t>(2, workers()));
  Result r;
  r.passed = first == second;
  r.detail = std::string(first == second ? "identical" : "different") + " sweep.csv (" +
             std::to_string(first.size()) + " bytes) across two runs with 1 and " +
             std::to_string(std::max<std::size_t>(2, workers())) + " workers";
  runtime_check(r, start, std::nullopt);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"Galton-Watson extinction oracle", galton_watson},
      {"mass-balance eigenvalue oracle", mass_balance},
      {"shift identity in the death rate", shift_identity},
      {"sign agreement between eigenvalue and survival", sign_equivalence},
      {"ordering suite on the benchmark sweep", monotonicity_suite},
      {"extinction fixed-point residual", fixed_point_residual},
      {"monotone integral non-increasing in mass", monotone_integral_property},
      {"offspring coupling validator", coupling_validator},
      {"kernel CDF round trip and KS test", kernel_correctness},
      {"martingale diagnostic", martingale},
      {"Monte Carlo vs deterministic survival", cross_description},
      {"sweep determinism", determinism},
  };
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::strtoul(argv[i], nullptr, 10)));

  std::cout << "acceptance suite: " << cores() << " cores, runtime limits scaled by " << format_double(runtime_scale())
            << "\n"
            << std::flush;
  std::size_t failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const std::size_t id = k + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Result r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.passed) ++failed;
    std::printf("%s  %2zu  %s: %s\n", r.passed ? "PASS" : "FAIL", id, criteria[k].first.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
