#include "gfd/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gfd/flow.hpp"
#include "gfd/format.hpp"
#include "gfd/kernel.hpp"

namespace gfd {

namespace {

// (1 - e^{-a} - a e^{-a}) / a, the weight of the right end of a linear
// profile against e^{-s} on [0, a].
double ramp_weight(double a) {
  if (a < 1e-4) return a * (0.5 - a * (1.0 / 3.0 - a * (0.125 - a / 30.0)));
  const double e = std::exp(-a);
  return (1.0 - e - a * e) / a;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct IterationResult {
  std::vector<double> p;
  std::size_t generations = 0;
  bool converged = false;
  double last_delta = 0.0;
};

IterationResult iterate(const ExtinctionOperator& op, std::vector<double> p, const SolverSettings& settings) {
  IterationResult r;
  std::vector<double> next(p.size());
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t gen = 1; gen <= settings.max_generations; ++gen) {
    op.apply(p, next);
    const double delta = sup_distance(p, next);
    p.swap(next);
    r.generations = gen;
    r.last_delta = delta;
    const double ratio = delta / previous;
    previous = delta;
    if (delta == 0.0 || (delta < settings.tol && ratio < 1.0 && delta * ratio / (1.0 - ratio) < settings.tol)) {
      r.converged = true;
      break;
    }
  }
  r.p = std::move(p);
  return r;
}

}  // namespace

std::string ExtinctionProfile::tag() const {
  if (!converged) return "UNCONVERGED";
  if (fixed_point) return "FIXED_POINT";
  return "GENERATION " + std::to_string(generations);
}

ExtinctionOperator::ExtinctionOperator(const ModelDefinition& model, double S, double D, const MassGrid& grid)
    : grid_(grid), S_(S), D_(D) {
  const std::size_t n = grid.size();
  b_.resize(n);
  death_share_.resize(n);
  division_share_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = model.b(S, grid.node(i));
    b_[i] = b;
    const double total = b + D;
    death_share_[i] = total > 0.0 ? D / total : 0.0;
    division_share_[i] = total > 0.0 ? b / total : 1.0;
  }

  const GrowthFlow flow(model, S);
  const auto hazard = [&](double z) { return model.b(S, z) + D; };
  decay_.resize(n);
  w_self_.resize(n);
  w_next_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = flow.mass_integral(grid.node(i), grid.node(i + 1), hazard);
    const double e = std::exp(-a);
    const double w = ramp_weight(a);
    decay_[i] = e;
    w_next_[i] = w;
    w_self_[i] = std::max(0.0, (1.0 - e) - w);
  }
  // Last node: rho is held constant up to M. Whatever hazard mass is left
  // at M belongs to lineages that never branch nor die.
  {
    const bool hazard_to_top = D > 0.0 || model.division.eventually_positive();
    const double a = hazard_to_top ? kInfinity : flow.mass_integral(grid.node(n - 1), model.max_mass, hazard);
    decay_[n - 1] = 0.0;
    w_self_[n - 1] = -std::expm1(-a);
    w_next_[n - 1] = 0.0;
  }

  nodes_per_row_ = model.kernel.family() == KernelFamily::equal_mitosis ? 1 : static_cast<std::size_t>(kAlphaNodes);
  const std::size_t total = n * nodes_per_row_;
  quad_weight_.resize(total);
  left_j_.resize(total);
  left_t_.resize(total);
  right_j_.resize(total);
  right_t_.resize(total);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(i);
    const AlphaRule rule = alpha_rule(model.kernel, x);
    for (std::size_t k = 0; k < nodes_per_row_; ++k) {
      const std::size_t idx = i * nodes_per_row_ + k;
      std::size_t j;
      double t;
      quad_weight_[idx] = rule.weight[k];
      grid.stencil(rule.alpha[k] * x, j, t);
      left_j_[idx] = static_cast<std::uint32_t>(j);
      left_t_[idx] = t;
      grid.stencil((1.0 - rule.alpha[k]) * x, j, t);
      right_j_[idx] = static_cast<std::uint32_t>(j);
      right_t_[idx] = t;
    }
  }
}

void ExtinctionOperator::offspring_term(const std::vector<double>& p, std::vector<double>& phi) const {
  const std::size_t n = grid_.size();
  phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    const std::size_t base = i * nodes_per_row_;
    for (std::size_t k = 0; k < nodes_per_row_; ++k) {
      const std::size_t idx = base + k;
      const std::uint32_t jl = left_j_[idx];
      const std::uint32_t jr = right_j_[idx];
      const double pl = p[jl] + left_t_[idx] * (p[jl + 1] - p[jl]);
      const double pr = p[jr] + right_t_[idx] * (p[jr + 1] - p[jr]);
      sum += quad_weight_[idx] * pl * pr;
    }
    phi[i] = sum;
  }
}

void ExtinctionOperator::apply(const std::vector<double>& p, std::vector<double>& out) const {
  const std::size_t n = grid_.size();
  if (p.size() != n) throw std::invalid_argument("profile size does not match the grid");
  std::vector<double> rho;
  offspring_term(p, rho);
  for (std::size_t i = 0; i < n; ++i) rho[i] = death_share_[i] + division_share_[i] * rho[i];
  out.resize(n);
  out[n - 1] = w_self_[n - 1] * rho[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    out[i] = w_self_[i] * rho[i] + w_next_[i] * rho[i + 1] + decay_[i] * out[i + 1];
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
}

ExtinctionProfile constant_profile(const MassGrid& grid, double S, double D, double value) {
  ExtinctionProfile prof;
  prof.grid = grid;
  prof.p.assign(grid.size(), value);
  prof.S = S;
  prof.D = D;
  return prof;
}

ExtinctionProfile generation_step(const ExtinctionProfile& prev, const ModelDefinition& model, double S, double D) {
  if (prev.grid.max_mass() != model.max_mass || prev.p.size() != prev.grid.size() || prev.S != S || prev.D != D)
    throw std::invalid_argument("grid mismatch: profile does not belong to this grid or environment");
  const ExtinctionOperator op(model, S, D, prev.grid);
  ExtinctionProfile next = prev;
  op.apply(prev.p, next.p);
  next.generations = prev.generations + 1;
  next.fixed_point = false;
  next.last_delta = sup_distance(prev.p, next.p);
  return next;
}

ExtinctionProfile solve_extinction(const ModelDefinition& model, double S, double D, const SolverSettings& settings) {
  if (!(settings.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const MassGrid grid(model.max_mass, settings.grid);
  const ExtinctionOperator op(model, S, D, grid);
  ExtinctionProfile prof = constant_profile(grid, S, D, 0.0);
  auto below = iterate(op, prof.p, settings);
  prof.p = std::move(below.p);
  prof.generations = below.generations;
  prof.converged = below.converged;
  prof.fixed_point = below.converged;
  prof.last_delta = below.last_delta;
  if (settings.from_above) {
    auto above = iterate(op, std::vector<double>(grid.size(), 1.0 - settings.from_above_offset), settings);
    prof.from_above_gap = sup_distance(prof.p, above.p);
    prof.fixed_points_differ = prof.from_above_gap > 10.0 * settings.tol;
    prof.from_above = std::move(above.p);
  }
  return prof;
}

std::vector<double> fixed_point_residuals(const ExtinctionProfile& profile, const ModelDefinition& model) {
  const auto& grid = profile.grid;
  const std::size_t n = grid.size();
  const ExtinctionOperator op(model, profile.S, profile.D, grid);
  std::vector<double> phi;
  op.offspring_term(profile.p, phi);
  const auto& p = profile.p;
  const double h = grid.step();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dp;
    if (i == 0) dp = (p[1] - p[0]) / h;
    else if (i == n - 1) dp = (p[n - 1] - p[n - 2]) / h;
    else dp = (p[i + 1] - p[i - 1]) / (2.0 * h);
    const double x = grid.node(i);
    r[i] = model.g(profile.S, x) * dp + profile.D * (1.0 - p[i]) + model.b(profile.S, x) * (phi[i] - p[i]);
  }
  return r;
}

double fixed_point_residual(const ExtinctionProfile& profile, const ModelDefinition& model) {
  double worst = 0.0;
  for (double v : fixed_point_residuals(profile, model)) worst = std::max(worst, std::abs(v));
  return worst;
}

void write_profile_csv(std::ostream& out, const ExtinctionProfile& profile, double residual) {
  out << "# S=" << format_double(profile.S) << " D=" << format_double(profile.D)
      << " n_gen=" << profile.generations << " status=" << profile.tag()
      << " residual=" << format_double(residual) << " n=" << profile.grid.size() << "\n";
  out << "x,p\n";
  for (std::size_t i = 0; i < profile.grid.size(); ++i)
    out << format_double(profile.grid.node(i)) << "," << format_double(profile.p[i]) << "\n";
}

}  // namespace gfd
