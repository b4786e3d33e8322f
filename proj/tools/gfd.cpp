// gfd: command-line driver for sweeps, checks and single-cell solves.
//
// Settings resolve as flag > environment (GFD_SEED, GFD_THREADS, GFD_GRID,
// GFD_TRIALS, GFD_OUT) > config file > built-in default.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>

#include "gfd/assumptions.hpp"
#include "gfd/benchmark_models.hpp"
#include "gfd/config.hpp"
#include "gfd/experiments.hpp"
#include "gfd/extinction.hpp"
#include "gfd/format.hpp"
#include "gfd/simulator.hpp"
#include "gfd/spectral.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitBadConfig = 2;

struct CommonOptions {
  std::string config = "builtin:LOGRAMP";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> trials;
};

struct CellOptions {
  std::optional<double> S;
  std::optional<double> D;
  std::optional<double> x0;
};

template <typename T>
std::optional<T> env_number(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw gfd::ConfigError(std::string(name) + ": not a valid number: '" + text + "'");
  return value;
}

struct Resolved {
  gfd::RunConfig config;
  std::size_t threads = 1;
  fs::path out = "gfd-out";
};

Resolved resolve(const CommonOptions& opts) {
  Resolved r;
  r.config = gfd::load_config(opts.config).config;
  auto& cfg = r.config;

  if (auto v = env_number<std::uint64_t>("GFD_SEED")) cfg.sim.seed = *v;
  if (auto v = env_number<std::size_t>("GFD_THREADS")) cfg.sim.threads = *v;
  if (auto v = env_number<std::size_t>("GFD_GRID")) cfg.solver.grid = *v;
  if (auto v = env_number<std::size_t>("GFD_TRIALS")) cfg.sim.trials = *v;
  if (const char* out = std::getenv("GFD_OUT"); out != nullptr && *out != '\0') r.out = out;

  if (opts.seed) cfg.sim.seed = *opts.seed;
  if (opts.threads) cfg.sim.threads = *opts.threads;
  if (opts.grid) cfg.solver.grid = *opts.grid;
  if (opts.trials) cfg.sim.trials = *opts.trials;
  if (opts.out) r.out = *opts.out;

  if (cfg.solver.grid < 16) throw gfd::ConfigError("grid must be at least 16");
  if (cfg.sim.threads == 0) throw gfd::ConfigError("threads must be at least 1");
  r.threads = cfg.sim.threads;
  return r;
}

struct Cell {
  double S;
  double D;
  double x0;
};

Cell pick_cell(const gfd::RunConfig& cfg, const CellOptions& cell) {
  Cell c{cell.S.value_or(cfg.env.resource.front()), cell.D.value_or(cfg.env.death.front()),
         cell.x0.value_or(cfg.x0)};
  if (!(c.S > 0.0)) throw gfd::ConfigError("--S must be positive");
  if (!(c.D >= 0.0)) throw gfd::ConfigError("--D must be non-negative");
  if (!(c.x0 > 0.0 && c.x0 < cfg.model.max_mass)) throw gfd::ConfigError("--x0 must lie in (0, M)");
  return c;
}

std::string cell_stem(double S, double D) { return "S" + gfd::format_double(S) + "_D" + gfd::format_double(D); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  return file;
}

int cmd_validate(const CommonOptions& opts) {
  const auto r = resolve(opts);
  const auto& cfg = r.config;
  const auto report = gfd::validate_assumptions(cfg.model, cfg.env, cfg.solver.probe, cfg.solver.probe);
  std::cout << report.render();
  std::cout << "empirical q-bar: " << gfd::format_double(report.empirical_q_bar) << "\n";
  return report.all_passed() ? 0 : 1;
}

struct SweepRun {
  gfd::SweepResult sweep;
  gfd::ConsistencyReport consistency;
  gfd::MonotonicityReport monotonicity;
  int exit_code = 0;
};

SweepRun run(const Resolved& r, bool monte_carlo) {
  SweepRun s;
  gfd::SweepOptions options;
  options.threads = r.threads;
  options.monte_carlo = monte_carlo;
  s.sweep = gfd::run_sweep(r.config, options);
  s.consistency = gfd::check_consistency(s.sweep.rows, r.config.solver.epsilon_lambda, r.config.solver.epsilon_p);
  gfd::MonotonicityOptions mono;
  mono.slack = r.config.solver.monotone_slack;
  s.monotonicity = gfd::check_monotonicity(s.sweep, mono);
  s.exit_code = gfd::sweep_exit_code(s.sweep, s.consistency, s.monotonicity);
  return s;
}

int cmd_sweep(const CommonOptions& opts, bool monte_carlo) {
  const auto r = resolve(opts);
  const auto s = run(r, monte_carlo);
  fs::create_directories(r.out / "profiles");
  fs::create_directories(r.out / "spectra");
  {
    auto file = open_out(r.out / "sweep.csv");
    gfd::write_sweep_csv(file, s.sweep);
  }
  {
    auto file = open_out(r.out / "timings.csv");
    gfd::write_timings_csv(file, s.sweep);
  }
  {
    auto file = open_out(r.out / "report.txt");
    gfd::write_report(file, s.sweep, s.consistency, s.monotonicity);
  }
  for (std::size_t k = 0; k < s.sweep.rows.size(); ++k) {
    const auto& row = s.sweep.rows[k];
    const std::string stem = cell_stem(row.S, row.D);
    auto p = open_out(r.out / "profiles" / ("extinction_" + stem + ".csv"));
    gfd::write_profile_csv(p, s.sweep.profiles[k], row.fixed_point_residual);
    auto u = open_out(r.out / "spectra" / ("eigen_" + stem + ".csv"));
    gfd::write_spectral_csv(u, s.sweep.spectra[k]);
  }
  std::cout << "wrote " << s.sweep.rows.size() << " rows to " << (r.out / "sweep.csv").string() << "\n";
  std::cout << "consistency failures: " << s.consistency.failures()
            << ", inconclusive: " << s.consistency.inconclusive() << "\n";
  std::cout << "ordering claims: " << (s.monotonicity.passed() ? "PASS" : "FAIL") << "\n";
  return s.exit_code;
}

int cmd_check(const CommonOptions& opts, bool monte_carlo) {
  const auto r = resolve(opts);
  const auto s = run(r, monte_carlo);
  gfd::write_report(std::cout, s.sweep, s.consistency, s.monotonicity);
  return s.exit_code;
}

int cmd_extinction(const CommonOptions& opts, const CellOptions& cell_opts) {
  const auto r = resolve(opts);
  const auto& cfg = r.config;
  const auto c = pick_cell(cfg, cell_opts);
  const auto profile = gfd::solve_extinction(cfg.model, c.S, c.D, cfg.solver);
  const double residual = gfd::fixed_point_residual(profile, cfg.model);
  gfd::write_profile_csv(std::cout, profile, residual);
  std::cerr << profile.tag() << " after " << profile.generations << " generations, p(x0)="
            << gfd::format_double(profile.at(c.x0)) << ", residual " << gfd::format_double(residual) << "\n";
  return profile.converged ? 0 : 1;
}

int cmd_spectral(const CommonOptions& opts, const CellOptions& cell_opts) {
  const auto r = resolve(opts);
  const auto& cfg = r.config;
  const auto c = pick_cell(cfg, cell_opts);
  const auto sol = gfd::principal_eigenpair(cfg.model, c.S, c.D, cfg.solver);
  gfd::write_spectral_csv(std::cout, sol);
  std::cerr << sol.tag() << " lambda=" << gfd::format_double(sol.lambda) << " residuals "
            << gfd::format_double(sol.primal_residual) << " / " << gfd::format_double(sol.adjoint_residual) << "\n";
  return sol.converged ? 0 : 1;
}

int cmd_simulate(const CommonOptions& opts, const CellOptions& cell_opts, const std::string& log_path) {
  const auto r = resolve(opts);
  const auto& cfg = r.config;
  const auto c = pick_cell(cfg, cell_opts);
  const gfd::BranchingSimulator sim(cfg.model, c.S, c.D);
  const gfd::SimulationLimits limits{cfg.sim.gen_limit, cfg.sim.pop_cap, cfg.sim.time_horizon};
  const auto est = gfd::estimate_survival(sim, c.x0, cfg.sim.trials, limits, cfg.sim.seed, r.threads);
  std::cout << "S=" << gfd::format_double(c.S) << " D=" << gfd::format_double(c.D)
            << " x0=" << gfd::format_double(c.x0) << "\n";
  std::cout << "survival " << gfd::format_double(est.estimate) << " [" << gfd::format_double(est.ci.lo) << ", "
            << gfd::format_double(est.ci.hi) << "] from " << est.trials << " trials\n";
  std::cout << "censored: generations " << est.censored_generations << ", population " << est.censored_population
            << ", time " << est.censored_time << ", immortal " << est.immortal << "\n";
  std::cout << "policy: " << est.policy() << "\n";
  if (!log_path.empty()) {
    auto log = open_out(log_path);
    const auto outcome = sim.simulate(c.x0, limits, cfg.sim.seed, 0, &log);
    std::cout << "trial 0 event log: " << log_path << " (" << gfd::to_string(outcome.kind) << ")\n";
  }
  return 0;
}

int cmd_martingale(const CommonOptions& opts, const CellOptions& cell_opts, double z_limit) {
  const auto r = resolve(opts);
  const auto& cfg = r.config;
  const auto c = pick_cell(cfg, cell_opts);
  const auto sol = gfd::principal_eigenpair(cfg.model, c.S, c.D, cfg.solver);
  const gfd::BranchingSimulator sim(cfg.model, c.S, c.D);
  const auto report = gfd::martingale_check(sim, c.x0, sol.lambda, sol.v, cfg.sim.checkpoints, cfg.sim.trials,
                                            cfg.sim.pop_cap, cfg.sim.seed, r.threads);
  std::cout << "lambda=" << gfd::format_double(report.lambda) << " v(x0)=" << gfd::format_double(report.expected)
            << " trials=" << report.trials << " capped=" << report.capped << "\n";
  std::cout << "t,mean,std_error,z\n";
  for (const auto& cp : report.checkpoints)
    std::cout << gfd::format_double(cp.time) << ',' << gfd::format_double(cp.mean) << ','
              << gfd::format_double(cp.std_error) << ',' << gfd::format_double(cp.z) << "\n";
  return sol.converged && report.max_abs_z() <= z_limit ? 0 : 1;
}

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config, "Config file or builtin:NAME")->capture_default_str();
  sub->add_option("--seed", opts.seed, "Master seed");
  sub->add_option("--out", opts.out, "Output directory");
  sub->add_option("--threads", opts.threads, "Worker threads");
  sub->add_option("--grid", opts.grid, "Mass grid cells");
  sub->add_option("--trials", opts.trials, "Monte Carlo trials");
}

void add_cell(CLI::App* sub, CellOptions& cell) {
  sub->add_option("--S", cell.S, "Resource level (default: first of the S ladder)");
  sub->add_option("--D", cell.D, "Death rate (default: first of the D ladder)");
  sub->add_option("--x0", cell.x0, "Initial mass (default: config x0)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gfd: growth-fragmentation branching model driver"};
  app.require_subcommand(1);

  CommonOptions opts;
  CellOptions cell;
  bool no_mc = false;
  std::string log_path;
  double z_limit = 4.0;

  auto* validate = app.add_subcommand("validate", "Check model assumptions only");
  auto* sweep = app.add_subcommand("sweep", "Run the (S, D) sweep and write CSV outputs");
  auto* check = app.add_subcommand("check", "Run the sweep and print the consistency and ordering report");
  auto* extinction = app.add_subcommand("extinction", "Extinction profile for one cell (CSV on stdout)");
  auto* spectral = app.add_subcommand("spectral", "Principal eigenpair for one cell (CSV on stdout)");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo survival for one cell");
  auto* martingale = app.add_subcommand("martingale", "Martingale diagnostic for one cell");
  auto* list = app.add_subcommand("list", "List built-in models");

  for (auto* sub : {validate, sweep, check, extinction, spectral, simulate, martingale}) add_common(sub, opts);
  for (auto* sub : {extinction, spectral, simulate, martingale}) add_cell(sub, cell);
  sweep->add_flag("--no-mc", no_mc, "Skip Monte Carlo estimates");
  check->add_flag("--no-mc", no_mc, "Skip Monte Carlo estimates");
  simulate->add_option("--log", log_path, "Write the binary event log of trial 0 to this file");
  martingale->add_option("--z-limit", z_limit, "Largest acceptable |z|")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& name : gfd::builtin_names()) std::cout << "builtin:" << name << "\n";
      return 0;
    }
    if (*validate) return cmd_validate(opts);
    if (*sweep) return cmd_sweep(opts, !no_mc);
    if (*check) return cmd_check(opts, !no_mc);
    if (*extinction) return cmd_extinction(opts, cell);
    if (*spectral) return cmd_spectral(opts, cell);
    if (*simulate) return cmd_simulate(opts, cell, log_path);
    if (*martingale) return cmd_martingale(opts, cell, z_limit);
  } catch (const gfd::ConfigError& e) {
    std::cerr << "gfd: configuration error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "gfd: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
