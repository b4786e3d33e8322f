#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfd/grid.hpp"
#include "gfd/model.hpp"

namespace gfd {

/// Extinction probabilities on a mass grid, either after a number of
/// generations or at the fixed point.
struct ExtinctionProfile {
  MassGrid grid;
  std::vector<double> p;
  double S = 0.0;
  double D = 0.0;
  std::size_t generations = 0;
  bool fixed_point = false;  // set by solve_extinction on convergence
  bool converged = true;
  double last_delta = 0.0;

  /// Limit of the iteration started just below p = 1, when requested.
  std::optional<std::vector<double>> from_above;
  double from_above_gap = 0.0;
  bool fixed_points_differ = false;

  /// "FIXED_POINT", "UNCONVERGED" or "GENERATION <n>".
  std::string tag() const;
  double at(double x) const { return grid.interpolate(p, x); }
};

/// Precomputed generation map p_n -> p_{n+1} for one (model, S, D, grid).
///
/// Writing rho = (D + b Phi) / (b + D) and s for the accumulated hazard
/// int (b + D) / g along the flow, the mass-variable recursion reads
/// p(x) = int_0^inf rho e^{-s} ds. Between two nodes rho is taken linear in
/// s, which integrates exactly against e^{-s}; every step is then a convex
/// combination of rho values and the map stays monotone and within [0, 1].
class ExtinctionOperator {
 public:
  ExtinctionOperator(const ModelDefinition& model, double S, double D, const MassGrid& grid);

  const MassGrid& grid() const { return grid_; }
  double resource() const { return S_; }
  double death_rate() const { return D_; }

  /// Phi(x_i) = int q(x_i, a) p(a x_i) p((1 - a) x_i) da for node values p.
  void offspring_term(const std::vector<double>& p, std::vector<double>& phi) const;

  /// One generation: out = map(p).
  void apply(const std::vector<double>& p, std::vector<double>& out) const;

 private:
  MassGrid grid_;
  double S_;
  double D_;
  std::vector<double> b_;
  std::vector<double> death_share_;     // D / (b + D), 0 where b + D = 0
  std::vector<double> division_share_;  // b / (b + D), 1 where b + D = 0
  std::vector<double> decay_;           // e^{-a_i}
  std::vector<double> w_self_;          // weight of rho_i in cell i
  std::vector<double> w_next_;          // weight of rho_{i+1} in cell i
  std::size_t nodes_per_row_ = 0;
  std::vector<double> quad_weight_;     // n x nodes
  std::vector<std::uint32_t> left_j_;   // stencils of a x_i
  std::vector<double> left_t_;
  std::vector<std::uint32_t> right_j_;  // stencils of (1 - a) x_i
  std::vector<double> right_t_;
};

/// Applies one generation to `prev`. Throws std::invalid_argument when the
/// profile's grid or environment does not match.
ExtinctionProfile generation_step(const ExtinctionProfile& prev, const ModelDefinition& model, double S, double D);

/// Profile p_0 = value on `grid`.
ExtinctionProfile constant_profile(const MassGrid& grid, double S, double D, double value);

/// Iterates the generation map from p = 0 until the sup-norm change and the
/// geometric estimate of the remaining error both fall below settings.tol.
ExtinctionProfile solve_extinction(const ModelDefinition& model, double S, double D, const SolverSettings& settings);

/// Sup norm of g p' + D (1 - p) + b (Phi - p) over the grid, with centred
/// differences inside and one-sided differences at the two end nodes.
double fixed_point_residual(const ExtinctionProfile& profile, const ModelDefinition& model);

/// Pointwise residual, same definition as fixed_point_residual.
std::vector<double> fixed_point_residuals(const ExtinctionProfile& profile, const ModelDefinition& model);

/// CSV with a "# key=value" header line followed by "x,p" rows.
void write_profile_csv(std::ostream& out, const ExtinctionProfile& profile, double residual);

}  // namespace gfd
