#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gfd {

enum class KernelFamily {
  uniform,          // flat density on [l(x), 1 - l(x)]
  beta_ramp,        // power ramps (alpha - l)^beta mirrored about 1/2
  equal_mitosis,    // point mass at 1/2, no density
  asymmetric_step,  // 2 * 1{alpha < 1/2}; deliberately violates symmetry
};

std::string to_string(KernelFamily family);
std::optional<KernelFamily> kernel_family_from_string(const std::string& tag);

/// Distribution q(x, .) of the fraction of the mother's mass kept by one
/// daughter. The cut-off l and the exponent beta are affine in the mother
/// mass: l(x) = l0 + l1 * x / M, beta(x) = beta0 + beta1 * x / M.
class DivisionKernel {
 public:
  struct Params {
    KernelFamily family = KernelFamily::uniform;
    double max_mass = 1.0;
    double l0 = 0.25;
    double l1 = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;
  };

  DivisionKernel() = default;
  explicit DivisionKernel(Params params);

  static DivisionKernel uniform(double max_mass, double l);
  static DivisionKernel beta_ramp(double max_mass, double l, double beta);
  static DivisionKernel equal_mitosis(double max_mass);
  static DivisionKernel asymmetric_step(double max_mass);

  const Params& params() const { return params_; }
  KernelFamily family() const { return params_.family; }
  bool has_density() const { return params_.family != KernelFamily::equal_mitosis; }

  double cutoff(double x) const;           // l(x)
  double cutoff_slope() const;             // l'(x)
  double exponent(double x) const;         // beta(x)
  double exponent_slope() const;           // beta'(x)

  /// Lower and upper end of the support of q(x, .).
  double support_lo(double x) const;
  double support_hi(double x) const;

  /// q(x, alpha). Throws std::logic_error for equal mitosis.
  double density(double x, double alpha) const;
  /// F_x(u). Throws std::logic_error for equal mitosis.
  double cdf(double x, double u) const;
  /// Generalized inverse F_x^{-1}(v) for v in (0, 1).
  double inverse_cdf(double x, double v) const;
  /// d/dx F_x^{-1}(v) at fixed v.
  double inverse_cdf_dx(double x, double v) const;
  /// Inverse-transform draw from q(x, .) given a uniform variate.
  double sample(double x, double u) const { return inverse_cdf(x, u); }

 private:
  Params params_{};
};

/// Non-increasing function tabulated on strictly increasing abscissae,
/// evaluated by piecewise-linear interpolation and held constant beyond the
/// first and last knots. Both operations preserve monotonicity.
class MonotoneTable {
 public:
  MonotoneTable() = default;
  MonotoneTable(std::vector<double> xs, std::vector<double> values);

  double operator()(double z) const;
  std::span<const double> xs() const { return xs_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> xs_;
  std::vector<double> values_;
  bool uniform_ = false;
  double x0_ = 0.0;
  double step_ = 0.0;
};

/// Nodes used for every alpha-integral over the kernel support.
inline constexpr int kAlphaNodes = 129;

/// Quadrature rule for integral_0^1 q(x, alpha) phi(alpha) d alpha: nodes in
/// alpha and weights that already include q(x, alpha).
struct AlphaRule {
  std::vector<double> alpha;
  std::vector<double> weight;
};

/// Composite Simpson with kAlphaNodes nodes over [l(x), 1 - l(x)] (a single
/// node at 1/2 for equal mitosis). Weights are rescaled to sum to exactly 1.
AlphaRule alpha_rule(const DivisionKernel& kernel, double x);

/// x -> integral_0^1 q(x, a) f(a x) f((1 - a) x) da.
double monotone_integral(const DivisionKernel& kernel, const MonotoneTable& f, double x);

struct CouplingViolation {
  double x = 0.0;
  double y = 0.0;
  double u = 0.0;
  double amount = 0.0;
  std::string which;
};

/// Outcome of the offspring-mass ordering checks. `passed` combines the
/// mass-level two-point form and the differential form; the literal form is
/// informational only.
struct CouplingReport {
  bool two_point_pass = true;
  bool differential_pass = true;
  bool literal_pass = true;
  bool passed = true;
  std::size_t pairs_checked = 0;
  std::optional<CouplingViolation> first_two_point_violation;
  std::optional<CouplingViolation> first_differential_violation;
  std::optional<CouplingViolation> first_literal_violation;
};

/// Checks that daughters of larger mothers can be coupled to be larger:
/// for x <= y on the grid, x F_x^{-1}(u) <= y F_y^{-1}(u) and
/// x (1 - F_x^{-1}(u)) <= y (1 - F_y^{-1}(u)); plus the pointwise
/// derivative criterion 0 <= F_x^{-1}(u) + x d/dx F_x^{-1}(u) <= 1, plus the
/// literal normalized-mass inequality (1 - x/M) F_x^{-1} <= (1 - y/M) F_y^{-1}.
CouplingReport check_coupling(const DivisionKernel& kernel, std::span<const double> x_grid,
                              std::span<const double> u_grid, double slack = 1e-12);

}  // namespace gfd
