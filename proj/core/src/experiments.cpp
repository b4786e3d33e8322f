#include "gfd/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "gfd/config.hpp"
#include "gfd/format.hpp"

namespace gfd {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string cell(double S, double D) { return "S=" + format_double(S) + " D=" + format_double(D); }

// Records a violation of size `amount` if it exceeds the current worst.
void note(Claim& claim, double amount, const std::string& where) {
  ++claim.comparisons;
  if (amount > claim.worst) {
    claim.worst = amount;
    claim.where = where;
  }
}

Claim make_claim(std::string label, bool asserted) {
  Claim claim;
  claim.label = std::move(label);
  claim.asserted = asserted;
  return claim;
}

void settle(Claim& claim, double slack) { claim.passed = claim.worst <= slack; }

}  // namespace

SweepResult run_sweep(const RunConfig& config, const SweepOptions& options) {
  SweepResult out;
  out.config = config;
  const auto& model = config.model;
  const auto& env = config.env;
  const auto probe = std::max<std::size_t>(config.solver.probe, 16);
  out.assumptions = validate_assumptions(model, env, probe, probe);

  const std::size_t nd = env.death.size();
  const std::size_t cells = env.resource.size() * nd;
  out.rows.resize(cells);
  out.profiles.resize(cells);
  out.spectra.resize(cells);
  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  const std::size_t outer = std::min(threads, std::max<std::size_t>(1, cells));
  const std::size_t inner = std::max<std::size_t>(1, threads / outer);

  const SimulationLimits limits{config.sim.gen_limit, config.sim.pop_cap, config.sim.time_horizon};
  parallel_for(cells, outer, [&](std::size_t k) {
    const double S = env.resource[k / nd];
    const double D = env.death[k % nd];
    SweepRow& row = out.rows[k];
    row.S = S;
    row.D = D;

    auto start = std::chrono::steady_clock::now();
    out.spectra[k] = principal_eigenpair(model, S, D, config.solver);
    const auto& sol = out.spectra[k];
    row.spectral_seconds = seconds_since(start);
    row.lambda = sol.lambda;
    row.primal_residual = sol.primal_residual;
    row.adjoint_residual = sol.adjoint_residual;
    row.spectral_converged = sol.converged;
    row.growth_positive = sol.growth_positive;

    start = std::chrono::steady_clock::now();
    out.profiles[k] = solve_extinction(model, S, D, config.solver);
    const auto& prof = out.profiles[k];
    row.extinction_x0 = prof.at(config.x0);
    row.generations = prof.generations;
    row.extinction_converged = prof.converged;
    row.fixed_point_residual = fixed_point_residual(prof, model);
    row.extinction_seconds = seconds_since(start);

    if (options.monte_carlo && config.sim.trials > 0) {
      start = std::chrono::steady_clock::now();
      const BranchingSimulator sim(model, S, D);
      row.survival = estimate_survival(sim, config.x0, config.sim.trials, limits, config.sim.seed, inner);
      row.simulation_seconds = seconds_since(start);
    }
  });
  return out;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

std::size_t ConsistencyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ConsistencyRow& r) { return r.verdict == Verdict::fail; }));
}

std::size_t ConsistencyReport::inconclusive() const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const ConsistencyRow& r) { return r.verdict == Verdict::inconclusive; }));
}

ConsistencyReport check_consistency(const std::vector<SweepRow>& rows, double eps_lambda, double eps_p) {
  ConsistencyReport report;
  for (const auto& row : rows) {
    ConsistencyRow c{row.S, row.D, Verdict::pass, {}};
    const double survival = row.deterministic_survival();
    if (std::abs(row.lambda) <= eps_lambda) {
      c.verdict = Verdict::inconclusive;
      c.reason = "|lambda| <= " + format_double(eps_lambda);
    } else if (row.lambda > 0.0) {
      if (!(survival > eps_p)) {
        c.verdict = Verdict::fail;
        c.reason = "lambda > 0 but deterministic survival " + format_double(survival);
      } else if (row.survival && !(row.survival->ci.lo > 0.0)) {
        c.verdict = Verdict::fail;
        c.reason = "lambda > 0 but Monte Carlo interval reaches 0";
      }
    } else {
      if (!(survival < eps_p)) {
        c.verdict = Verdict::fail;
        c.reason = "lambda < 0 but deterministic survival " + format_double(survival);
      } else if (row.survival && !(row.survival->ci.lo <= eps_p)) {
        c.verdict = Verdict::fail;
        c.reason = "lambda < 0 but Monte Carlo lower bound " + format_double(row.survival->ci.lo);
      }
    }
    report.rows.push_back(std::move(c));
  }
  return report;
}

bool MonotonicityReport::passed() const {
  return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.passed || !c.asserted; });
}

MonotonicityReport check_monotonicity(const SweepResult& sweep, const MonotonicityOptions& options) {
  const auto& env = sweep.config.env;
  const auto& a = sweep.assumptions;
  const auto& model = sweep.config.model;
  const std::size_t ns = env.resource.size();
  const std::size_t nd = env.death.size();
  const double slack = options.slack;
  MonotonicityReport report;

  Claim mass = make_claim("extinction probability non-increasing in initial mass", a.mass_ordering());
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t d = 0; d < nd; ++d) {
      const auto& prof = sweep.profile(s, d);
      for (std::size_t i = 0; i + 1 < prof.p.size(); ++i)
        note(mass, prof.p[i + 1] - prof.p[i], cell(env.resource[s], env.death[d]) + " x=" + format_double(prof.grid.node(i)));
    }
  settle(mass, slack);
  report.claims.push_back(mass);

  Claim death = make_claim("extinction probability non-decreasing in death rate", a.death_ordering());
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t d = 0; d + 1 < nd; ++d) {
      const auto& lo = sweep.profile(s, d).p;
      const auto& hi = sweep.profile(s, d + 1).p;
      for (std::size_t i = 0; i < lo.size(); ++i)
        note(death, lo[i] - hi[i], cell(env.resource[s], env.death[d]) + " i=" + std::to_string(i));
    }
  settle(death, slack);
  report.claims.push_back(death);

  Claim resource = make_claim("extinction probability non-increasing in resource S", a.resource_ordering());
  Claim lambda = make_claim("principal eigenvalue non-decreasing in resource S", a.resource_ordering());
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t s = 0; s + 1 < ns; ++s) {
      const auto& lo = sweep.profile(s, d).p;
      const auto& hi = sweep.profile(s + 1, d).p;
      for (std::size_t i = 0; i < lo.size(); ++i)
        note(resource, hi[i] - lo[i], cell(env.resource[s], env.death[d]) + " i=" + std::to_string(i));
      note(lambda, sweep.row(s, d).lambda - sweep.row(s + 1, d).lambda, cell(env.resource[s], env.death[d]));
    }
  settle(resource, slack);
  settle(lambda, slack);
  report.claims.push_back(resource);
  report.claims.push_back(lambda);

  // Separable growth g = mu(S) g~(x) with b independent of S: survival and
  // Lambda are ordered exactly as mu.
  const bool b_free_of_s = model.division.params().s_half <= 0.0;
  Claim separable = make_claim("growth-rate factor mu(S) orders eigenvalue and survival",
                  a.standing() && a.coupling_ok && a.division_monotone_x && b_free_of_s);
  for (std::size_t s1 = 0; s1 < ns; ++s1)
    for (std::size_t s2 = s1 + 1; s2 < ns; ++s2) {
      const double mu1 = model.growth.mu(env.resource[s1]);
      const double mu2 = model.growth.mu(env.resource[s2]);
      const int dir = mu1 < mu2 ? 1 : (mu1 > mu2 ? -1 : 0);
      for (std::size_t d = 0; d < nd; ++d) {
        const auto& r1 = sweep.row(s1, d);
        const auto& r2 = sweep.row(s2, d);
        const auto& p1 = sweep.profile(s1, d).p;
        const auto& p2 = sweep.profile(s2, d).p;
        const std::string where = cell(env.resource[s1], env.death[d]) + " vs S=" + format_double(env.resource[s2]);
        double worst = 0.0;
        if (dir >= 0) worst = std::max(worst, r1.lambda - r2.lambda);
        if (dir <= 0) worst = std::max(worst, r2.lambda - r1.lambda);
        for (std::size_t i = 0; i < p1.size(); ++i) {
          if (dir >= 0) worst = std::max(worst, p2[i] - p1[i]);
          if (dir <= 0) worst = std::max(worst, p1[i] - p2[i]);
        }
        note(separable, worst, where);
      }
    }
  settle(separable, slack);
  report.claims.push_back(separable);

  // Survival ordered at every D of the ladder implies Lambda ordered at
  // every D.
  Claim transfer = make_claim("survival ordering across all D implies eigenvalue ordering", a.standing());
  for (std::size_t s1 = 0; s1 < ns; ++s1)
    for (std::size_t s2 = 0; s2 < ns; ++s2) {
      if (s1 == s2) continue;
      bool premise = true;
      for (std::size_t d = 0; d < nd && premise; ++d) {
        const auto& p1 = sweep.profile(s1, d).p;
        const auto& p2 = sweep.profile(s2, d).p;
        for (std::size_t i = 0; i < p1.size() && premise; ++i) premise = p1[i] <= p2[i] + slack;
      }
      if (!premise) continue;
      for (std::size_t d = 0; d < nd; ++d)
        note(transfer, sweep.row(s2, d).lambda - sweep.row(s1, d).lambda,
             cell(env.resource[s1], env.death[d]) + " vs S=" + format_double(env.resource[s2]));
    }
  settle(transfer, slack);
  report.claims.push_back(transfer);

  const bool have_mc = !sweep.rows.empty() && sweep.rows.front().survival.has_value();
  if (have_mc) {
    Claim mc_order = make_claim("Monte Carlo survival non-decreasing in S up to interval overlap", a.resource_ordering());
    for (std::size_t d = 0; d < nd; ++d)
      for (std::size_t s = 0; s + 1 < ns; ++s) {
        const auto& lo = *sweep.row(s, d).survival;
        const auto& hi = *sweep.row(s + 1, d).survival;
        note(mc_order, lo.ci.lo - hi.ci.hi, cell(env.resource[s], env.death[d]));
      }
    settle(mc_order, 0.0);
    report.claims.push_back(mc_order);

    Claim agree = make_claim("Monte Carlo survival matches deterministic survival within interval + " +
                    format_double(options.agreement_slack),
                true);
    for (const auto& row : sweep.rows) {
      const double gap = std::abs(row.survival->estimate - row.deterministic_survival());
      note(agree, gap - row.survival->half_width(), cell(row.S, row.D));
    }
    settle(agree, options.agreement_slack);
    report.claims.push_back(agree);
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  const auto& cfg = sweep.config;
  const auto consistency = check_consistency(sweep.rows, cfg.solver.epsilon_lambda, cfg.solver.epsilon_p);
  out << "# gfd sweep config_hash=" << config_hash(cfg) << " seed=" << cfg.sim.seed
      << " x0=" << format_double(cfg.x0) << " grid=" << cfg.solver.grid << " trials=" << cfg.sim.trials
      << " gen_limit=" << cfg.sim.gen_limit << " pop_cap=" << cfg.sim.pop_cap
      << " time_horizon=" << format_double(cfg.sim.time_horizon) << "\n";
  out << "S,D,lambda,lambda_plus_D_positive,primal_residual,adjoint_residual,spectral_status,"
         "extinction_x0,survival_deterministic,generations,extinction_status,fixed_point_residual,"
         "mc_survival,mc_ci_lo,mc_ci_hi,mc_trials,mc_censored_generations,mc_censored_population,"
         "mc_censored_time,mc_immortal,consistency\n";
  for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
    const auto& r = sweep.rows[k];
    out << format_double(r.S) << ',' << format_double(r.D) << ',' << format_double(r.lambda) << ','
        << (r.growth_positive ? "true" : "false") << ',' << format_double(r.primal_residual) << ','
        << format_double(r.adjoint_residual) << ',' << (r.spectral_converged ? "CONVERGED" : "UNCONVERGED") << ','
        << format_double(r.extinction_x0) << ',' << format_double(r.deterministic_survival()) << ','
        << r.generations << ',' << (r.extinction_converged ? "FIXED_POINT" : "UNCONVERGED") << ','
        << format_double(r.fixed_point_residual) << ',';
    if (r.survival) {
      const auto& s = *r.survival;
      out << format_double(s.estimate) << ',' << format_double(s.ci.lo) << ',' << format_double(s.ci.hi) << ','
          << s.trials << ',' << s.censored_generations << ',' << s.censored_population << ',' << s.censored_time
          << ',' << s.immortal << ',';
    } else {
      out << ",,,0,0,0,0,0,";
    }
    out << to_string(consistency.rows[k].verdict) << "\n";
  }
}

void write_timings_csv(std::ostream& out, const SweepResult& sweep) {
  out << "S,D,spectral_seconds,extinction_seconds,simulation_seconds\n";
  for (const auto& r : sweep.rows)
    out << format_double(r.S) << ',' << format_double(r.D) << ',' << format_double(r.spectral_seconds) << ','
        << format_double(r.extinction_seconds) << ',' << format_double(r.simulation_seconds) << "\n";
}

void write_report(std::ostream& out, const SweepResult& sweep, const ConsistencyReport& consistency,
                  const MonotonicityReport& monotonicity) {
  const auto& cfg = sweep.config;
  out << "gfd sweep report\n";
  out << "config: " << cfg.source << " (hash " << config_hash(cfg) << ")\n";
  out << "cells: " << cfg.env.resource.size() << " S x " << cfg.env.death.size() << " D, grid " << cfg.solver.grid
      << ", trials " << cfg.sim.trials << ", seed " << cfg.sim.seed << "\n\n";

  out << "Model assumptions\n" << sweep.assumptions.render();
  out << "empirical q-bar: " << format_double(sweep.assumptions.empirical_q_bar) << "\n\n";

  out << "Sign agreement between eigenvalue and survival\n";
  for (const auto& r : consistency.rows) {
    out << to_string(r.verdict) << "  " << cell(r.S, r.D);
    if (!r.reason.empty()) out << "  " << r.reason;
    out << "\n";
  }
  out << "failures: " << consistency.failures() << ", inconclusive: " << consistency.inconclusive() << "\n\n";

  out << "Ordering claims\n";
  for (const auto& c : monotonicity.claims) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.label;
    if (!c.asserted) out << " [informational: hypotheses not validated]";
    out << "  comparisons " << c.comparisons << ", worst violation " << format_double(c.worst);
    if (c.worst > 0.0) out << " at " << c.where;
    out << "\n";
  }
  out << "\n";

  out << "Solver status\n";
  std::size_t unconverged = 0;
  for (const auto& r : sweep.rows) {
    if (r.converged()) continue;
    ++unconverged;
    out << "UNCONVERGED  " << cell(r.S, r.D) << (r.spectral_converged ? "" : " spectral")
        << (r.extinction_converged ? "" : " extinction") << "\n";
  }
  out << "unconverged cells: " << unconverged << "\n\n";

  out << "Timings (seconds)\n";
  double total = 0.0;
  for (const auto& r : sweep.rows) {
    const double t = r.spectral_seconds + r.extinction_seconds + r.simulation_seconds;
    total += t;
    out << cell(r.S, r.D) << "  spectral " << format_double(r.spectral_seconds) << "  extinction "
        << format_double(r.extinction_seconds) << "  simulation " << format_double(r.simulation_seconds) << "\n";
  }
  out << "total cell time: " << format_double(total) << "\n";
}

int sweep_exit_code(const SweepResult& sweep, const ConsistencyReport& consistency,
                    const MonotonicityReport& monotonicity) {
  const bool converged =
      std::all_of(sweep.rows.begin(), sweep.rows.end(), [](const SweepRow& r) { return r.converged(); });
  return converged && consistency.failures() == 0 && monotonicity.passed() ? 0 : 1;
}

}  // namespace gfd
