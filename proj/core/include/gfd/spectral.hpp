#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfd/grid.hpp"
#include "gfd/model.hpp"

namespace gfd {

/// Dense discretization of the growth-fragmentation-death operator (or its
/// adjoint) on a MassGrid. Off-diagonal entries are non-negative.
struct OperatorMatrix {
  MassGrid grid;
  double S = 0.0;
  double D = 0.0;
  Eigen::MatrixXd a;
  /// Factor applied to the fragmentation columns to enforce exact discrete
  /// mass balance. The cell-average construction needs none, so it is 1.
  double rescale = 1.0;
};

/// Primal operator -d/dx(g f) - (D + b) f + 2 int_x^M b(z)/z q(z, x/z) f(z) dz.
///
/// Transport is first-order upwind in flux form with zero inflow at the left
/// face; g(M) = 0 closes the right face. The fragmentation entry (i, j) is
/// 2 b(x_j) times the kernel mass that a mother at x_j sends into cell i,
/// F_{x_j}(e_i / x_j) - F_{x_j}(e_{i-1} / x_j), so every column j of the
/// fragmentation block sums to exactly 2 b(x_j).
OperatorMatrix assemble_operator(const ModelDefinition& model, double S, double D, const MassGrid& grid);

/// Adjoint operator -(D + b) f + g f' + 2 b int q(x, a) f(a x) da, with a
/// forward difference for f' (backward at the last node) and the alpha rule
/// plus linear interpolation for the integral.
OperatorMatrix assemble_adjoint(const ModelDefinition& model, double S, double D, const MassGrid& grid);

struct SpectralSolution {
  MassGrid grid;
  double S = 0.0;
  double D = 0.0;
  double lambda = 0.0;
  std::vector<double> u;  // sum u h = 1
  std::vector<double> v;  // sum u v h = 1
  double primal_residual = 0.0;
  double adjoint_residual = 0.0;
  double time_step = 0.0;
  std::size_t power_iterations = 0;
  std::size_t inverse_iterations = 0;
  bool converged = false;
  /// Side condition Lambda + D > 0.
  bool growth_positive = false;

  /// "CONVERGED" or "UNCONVERGED".
  std::string tag() const { return converged ? "CONVERGED" : "UNCONVERGED"; }
  double u_at(double x) const { return grid.interpolate(u, x); }
  double v_at(double x) const { return grid.interpolate(v, x); }
};

/// Perron eigenpair of the assembled operator.
///
/// Power iteration on P = I + dt A with dt = 0.9 / max |A_ii| (P >= 0)
/// until the relative residual is below 1e-4 or settings.eigen_max_iterations
/// is reached, then shifted inverse iteration with a shift just above the
/// current estimate, where (sigma - A)^{-1} is entrywise non-negative. The
/// adjoint vector comes from the transposed factorization. Lambda is the
/// two-sided Rayleigh quotient.
SpectralSolution principal_eigenpair(const OperatorMatrix& op, const SolverSettings& settings);

SpectralSolution principal_eigenpair(const ModelDefinition& model, double S, double D,
                                     const SolverSettings& settings);

struct EigenResidual {
  double primal = 0.0;   // |A u - Lambda u|_inf
  double adjoint = 0.0;  // |A^T v - Lambda v|_inf
};

EigenResidual eigen_residual(const SpectralSolution& sol, const OperatorMatrix& op);

/// |<A f, g>_h - <f, A* g>_h| for the primal matrix A and adjoint matrix A*.
double duality_defect(const OperatorMatrix& primal, const OperatorMatrix& adjoint, const std::vector<double>& f,
                      const std::vector<double>& g);

/// CSV with a "# key=value" header line followed by "x,u,v" rows.
void write_spectral_csv(std::ostream& out, const SpectralSolution& sol);

}  // namespace gfd
