#include "gfd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gfd/format.hpp"
#include "gfd/kernel.hpp"

namespace gfd {

namespace {

// Kernel mass below u for a mother at x, defined for every real u.
double fraction_below(const DivisionKernel& kernel, double x, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (!kernel.has_density()) return u >= 0.5 ? 1.0 : 0.0;
  return kernel.cdf(x, u);
}

using Vector = Eigen::VectorXd;

double sup_norm(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

// v^T A u / v^T u accumulated in extended precision.
double two_sided_quotient(const Eigen::MatrixXd& a, const Vector& u, const Vector& v) {
  const Eigen::Index n = a.rows();
  long double num = 0.0L, den = 0.0L;
  for (Eigen::Index j = 0; j < n; ++j) {
    long double column = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) column += static_cast<long double>(v[i]) * a(i, j);
    num += column * u[j];
    den += static_cast<long double>(v[j]) * u[j];
  }
  return static_cast<double>(num / den);
}

void clamp_positive(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::max(v[i], 0.0);
}

struct InverseResult {
  Vector x;
  std::size_t iterations = 0;
};

// Inverse iteration with a fixed factorization; `apply` multiplies by A or
// A^T, `solve` applies (sigma - A)^{-1} or its transpose.
template <class Apply, class Solve>
InverseResult inverse_iteration(Vector x, Apply apply, Solve solve, double tol, std::size_t max_iterations) {
  InverseResult r;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= max_iterations; ++k) {
    x = solve(x);
    clamp_positive(x);
    x /= sup_norm(x);
    r.iterations = k;
    const Vector y = apply(x);
    const double lambda = x.dot(y) / x.dot(x);
    const double res = sup_norm(y - lambda * x);
    if (res <= tol || res >= previous) break;
    previous = res;
  }
  r.x = std::move(x);
  return r;
}

}  // namespace

OperatorMatrix assemble_operator(const ModelDefinition& model, double S, double D, const MassGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h = grid.step();
  OperatorMatrix op{grid, S, D, Eigen::MatrixXd::Zero(n, n), 1.0};
  auto& a = op.a;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.node(static_cast<std::size_t>(i));
    const double outflow = model.g(S, grid.face(static_cast<std::size_t>(i))) / h;
    a(i, i) -= outflow + D + model.b(S, x);
    if (i + 1 < n) a(i + 1, i) += outflow;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj = grid.node(static_cast<std::size_t>(j));
    const double b = model.b(S, xj);
    if (b == 0.0) continue;
    double below = 0.0;
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double upper = fraction_below(model.kernel, xj, grid.face(static_cast<std::size_t>(i)) / xj);
      a(i, j) += 2.0 * b * (upper - below);
      below = upper;
    }
  }
  return op;
}

OperatorMatrix assemble_adjoint(const ModelDefinition& model, double S, double D, const MassGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h = grid.step();
  OperatorMatrix op{grid, S, D, Eigen::MatrixXd::Zero(n, n), 1.0};
  auto& a = op.a;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.node(static_cast<std::size_t>(i));
    const double b = model.b(S, x);
    a(i, i) -= D + b;
    // No transport term at the last node: the flux through M vanishes.
    if (i + 1 < n) {
      const double speed = model.g(S, x) / h;
      a(i, i) -= speed;
      a(i, i + 1) += speed;
    }
    if (b == 0.0) continue;
    const AlphaRule rule = alpha_rule(model.kernel, x);
    for (std::size_t k = 0; k < rule.alpha.size(); ++k) {
      std::size_t j;
      double t;
      grid.stencil(rule.alpha[k] * x, j, t);
      const double w = 2.0 * b * rule.weight[k];
      a(i, static_cast<Eigen::Index>(j)) += w * (1.0 - t);
      a(i, static_cast<Eigen::Index>(j + 1)) += w * t;
    }
  }
  return op;
}

SpectralSolution principal_eigenpair(const OperatorMatrix& op, const SolverSettings& settings) {
  const auto& a = op.a;
  const Eigen::Index n = a.rows();
  const double h = op.grid.step();
  SpectralSolution sol;
  sol.grid = op.grid;
  sol.S = op.S;
  sol.D = op.D;
  const double max_diag = a.diagonal().cwiseAbs().maxCoeff();
  sol.time_step = max_diag > 0.0 ? 0.9 / max_diag : 1.0;

  // Power phase.
  Vector u = Vector::Ones(n);
  double lambda = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= settings.eigen_max_iterations; ++k) {
    const Vector y = a * u;
    lambda = u.dot(y) / u.dot(u);
    residual = sup_norm(y - lambda * u);
    sol.power_iterations = k;
    if (residual <= 1e-4 * (1.0 + std::abs(lambda))) break;
    u += sol.time_step * y;
    u /= sup_norm(u);
  }

  // Inverse phase with a shift just to the right of the estimate.
  const double shift = lambda + std::max(10.0 * residual, 1e-8 * (1.0 + std::abs(lambda)));
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shift * Eigen::MatrixXd::Identity(n, n) - a);
  const double target = 1e-3 * settings.eigen_tol;
  const std::size_t cap = 200;
  auto primal = inverse_iteration(
      u, [&](const Vector& x) -> Vector { return a * x; },
      [&](const Vector& x) -> Vector { return lu.solve(x); }, target, cap);
  auto adjoint = inverse_iteration(
      Vector::Ones(n), [&](const Vector& x) -> Vector { return a.transpose() * x; },
      [&](const Vector& x) -> Vector { return lu.transpose().solve(x); }, target, cap);
  sol.inverse_iterations = std::max(primal.iterations, adjoint.iterations);

  Vector& uu = primal.x;
  Vector& vv = adjoint.x;
  sol.lambda = two_sided_quotient(a, uu, vv);
  uu /= uu.sum() * h;
  vv /= uu.dot(vv) * h;
  sol.u.assign(uu.data(), uu.data() + n);
  sol.v.assign(vv.data(), vv.data() + n);

  const EigenResidual res = eigen_residual(sol, op);
  sol.primal_residual = res.primal;
  sol.adjoint_residual = res.adjoint;
  const double scale = 1.0 + std::abs(sol.lambda);
  sol.converged = res.primal <= settings.eigen_tol * scale * sup_norm(uu) &&
                  res.adjoint <= settings.eigen_tol * scale * sup_norm(vv) && std::isfinite(sol.lambda);
  sol.growth_positive = sol.lambda + sol.D > 0.0;
  return sol;
}

SpectralSolution principal_eigenpair(const ModelDefinition& model, double S, double D,
                                     const SolverSettings& settings) {
  return principal_eigenpair(assemble_operator(model, S, D, MassGrid(model.max_mass, settings.grid)), settings);
}

EigenResidual eigen_residual(const SpectralSolution& sol, const OperatorMatrix& op) {
  const auto n = static_cast<Eigen::Index>(sol.u.size());
  const Eigen::Map<const Vector> u(sol.u.data(), n);
  const Eigen::Map<const Vector> v(sol.v.data(), n);
  return {sup_norm(op.a * u - sol.lambda * u), sup_norm(op.a.transpose() * v - sol.lambda * v)};
}

double duality_defect(const OperatorMatrix& primal, const OperatorMatrix& adjoint, const std::vector<double>& f,
                      const std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(f.size());
  const Eigen::Map<const Vector> ff(f.data(), n);
  const Eigen::Map<const Vector> gg(g.data(), n);
  const double h = primal.grid.step();
  return std::abs(h * gg.dot(primal.a * ff) - h * ff.dot(adjoint.a * gg));
}

void write_spectral_csv(std::ostream& out, const SpectralSolution& sol) {
  out << "# S=" << format_double(sol.S) << " D=" << format_double(sol.D) << " lambda=" << format_double(sol.lambda)
      << " primal_residual=" << format_double(sol.primal_residual)
      << " adjoint_residual=" << format_double(sol.adjoint_residual) << " n=" << sol.grid.size()
      << " power_iterations=" << sol.power_iterations << " inverse_iterations=" << sol.inverse_iterations
      << " status=" << sol.tag() << "\n";
  out << "x,u,v\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    out << format_double(sol.grid.node(i)) << "," << format_double(sol.u[i]) << "," << format_double(sol.v[i]) << "\n";
}

}  // namespace gfd
