#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfd/assumptions.hpp"
#include "gfd/extinction.hpp"
#include "gfd/model.hpp"
#include "gfd/simulator.hpp"
#include "gfd/spectral.hpp"

namespace gfd {

struct SweepRow {
  double S = 0.0;
  double D = 0.0;
  double lambda = 0.0;
  double primal_residual = 0.0;
  double adjoint_residual = 0.0;
  bool spectral_converged = false;
  bool growth_positive = false;  // Lambda + D > 0
  double extinction_x0 = 0.0;    // p(x0)
  std::size_t generations = 0;
  bool extinction_converged = false;
  double fixed_point_residual = 0.0;
  std::optional<SurvivalEstimate> survival;  // absent when Monte Carlo is off
  double spectral_seconds = 0.0;
  double extinction_seconds = 0.0;
  double simulation_seconds = 0.0;

  double deterministic_survival() const { return 1.0 - extinction_x0; }
  bool converged() const { return spectral_converged && extinction_converged; }
};

struct SweepOptions {
  std::size_t threads = 1;
  bool monte_carlo = true;
};

/// Rows are ordered by S, then D; profiles and spectra share that order.
struct SweepResult {
  RunConfig config;
  AssumptionReport assumptions;
  std::vector<SweepRow> rows;
  std::vector<ExtinctionProfile> profiles;
  std::vector<SpectralSolution> spectra;

  const SweepRow& row(std::size_t s_index, std::size_t d_index) const {
    return rows[s_index * config.env.death.size() + d_index];
  }
  const ExtinctionProfile& profile(std::size_t s_index, std::size_t d_index) const {
    return profiles[s_index * config.env.death.size() + d_index];
  }
};

/// For every (S, D) in the environment range: principal eigenpair,
/// extinction profile and, optionally, a Monte Carlo survival estimate.
/// Cells run on a worker pool; results do not depend on the worker count.
SweepResult run_sweep(const RunConfig& config, const SweepOptions& options);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict verdict);

struct ConsistencyRow {
  double S = 0.0;
  double D = 0.0;
  Verdict verdict = Verdict::pass;
  std::string reason;
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  std::size_t failures() const;
  std::size_t inconclusive() const;
};

/// Sign agreement between Lambda and survival: Lambda > eps_lambda needs
/// deterministic survival > eps_p and a Monte Carlo interval above 0;
/// Lambda < -eps_lambda needs deterministic survival < eps_p and a Monte
/// Carlo lower bound <= eps_p; anything in between is inconclusive.
ConsistencyReport check_consistency(const std::vector<SweepRow>& rows, double eps_lambda, double eps_p);

struct Claim {
  std::string label;
  bool asserted = true;  // false when the hypotheses it needs failed
  bool passed = true;
  std::size_t comparisons = 0;
  double worst = 0.0;  // largest violation, 0 when none
  std::string where;
};

struct MonotonicityReport {
  std::vector<Claim> claims;
  /// True when every asserted claim passed.
  bool passed() const;
};

struct MonotonicityOptions {
  double slack = 1e-8;
  /// Allowed gap between Monte Carlo and deterministic survival on top of
  /// the interval half-width.
  double agreement_slack = 2e-3;
};

/// Ordering claims on a finished sweep, each gated by the assumptions it
/// needs: p in x, p in D, p in S, Lambda in S, the separable-growth
/// equivalence, the survival-to-eigenvalue transfer across the D ladder,
/// Monte Carlo ordering in S up to interval overlap, and Monte Carlo versus
/// deterministic survival.
MonotonicityReport check_monotonicity(const SweepResult& sweep, const MonotonicityOptions& options = {});

/// Deterministic CSV (no timings) with a "# key=value" header line carrying
/// the configuration hash.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

/// Wall-clock timings per cell.
void write_timings_csv(std::ostream& out, const SweepResult& sweep);

/// Plain-text report: assumptions, consistency, claims, solver status.
void write_report(std::ostream& out, const SweepResult& sweep, const ConsistencyReport& consistency,
                  const MonotonicityReport& monotonicity);

/// 0 when every asserted claim passed, no consistency row failed and every
/// solver converged; 1 otherwise.
int sweep_exit_code(const SweepResult& sweep, const ConsistencyReport& consistency,
                    const MonotonicityReport& monotonicity);

}  // namespace gfd
