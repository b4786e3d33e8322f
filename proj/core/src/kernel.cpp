#include "gfd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gfd {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::beta_ramp: return "beta_ramp";
    case KernelFamily::equal_mitosis: return "equal_mitosis";
    case KernelFamily::asymmetric_step: return "asymmetric_step";
  }
  return "unknown";
}

std::optional<KernelFamily> kernel_family_from_string(const std::string& tag) {
  if (tag == "uniform") return KernelFamily::uniform;
  if (tag == "beta_ramp") return KernelFamily::beta_ramp;
  if (tag == "equal_mitosis") return KernelFamily::equal_mitosis;
  if (tag == "asymmetric_step") return KernelFamily::asymmetric_step;
  return std::nullopt;
}

DivisionKernel::DivisionKernel(Params params) : params_(params) {
  if (!(params_.max_mass > 0.0)) throw std::invalid_argument("kernel max_mass must be positive");
  if (params_.family == KernelFamily::uniform) {
    params_.beta0 = 0.0;
    params_.beta1 = 0.0;
  }
}

DivisionKernel DivisionKernel::uniform(double max_mass, double l) {
  return DivisionKernel(Params{KernelFamily::uniform, max_mass, l, 0.0, 0.0, 0.0});
}

DivisionKernel DivisionKernel::beta_ramp(double max_mass, double l, double beta) {
  return DivisionKernel(Params{KernelFamily::beta_ramp, max_mass, l, 0.0, beta, 0.0});
}

DivisionKernel DivisionKernel::equal_mitosis(double max_mass) {
  return DivisionKernel(Params{KernelFamily::equal_mitosis, max_mass, 0.5, 0.0, 0.0, 0.0});
}

DivisionKernel DivisionKernel::asymmetric_step(double max_mass) {
  return DivisionKernel(Params{KernelFamily::asymmetric_step, max_mass, 0.0, 0.0, 0.0, 0.0});
}

double DivisionKernel::cutoff(double x) const {
  return params_.l0 + params_.l1 * x / params_.max_mass;
}

double DivisionKernel::cutoff_slope() const { return params_.l1 / params_.max_mass; }

double DivisionKernel::exponent(double x) const {
  return params_.beta0 + params_.beta1 * x / params_.max_mass;
}

double DivisionKernel::exponent_slope() const { return params_.beta1 / params_.max_mass; }

double DivisionKernel::support_lo(double x) const {
  switch (params_.family) {
    case KernelFamily::equal_mitosis: return 0.5;
    case KernelFamily::asymmetric_step: return 0.0;
    default: return cutoff(x);
  }
}

double DivisionKernel::support_hi(double x) const {
  switch (params_.family) {
    case KernelFamily::equal_mitosis: return 0.5;
    case KernelFamily::asymmetric_step: return 0.5;
    default: return 1.0 - cutoff(x);
  }
}

double DivisionKernel::density(double x, double alpha) const {
  switch (params_.family) {
    case KernelFamily::equal_mitosis:
      throw std::logic_error("equal mitosis kernel has no density");
    case KernelFamily::asymmetric_step:
      return (alpha >= 0.0 && alpha < 0.5) ? 2.0 : 0.0;
    case KernelFamily::uniform: {
      const double l = cutoff(x);
      return (alpha >= l && alpha <= 1.0 - l) ? 1.0 / (1.0 - 2.0 * l) : 0.0;
    }
    case KernelFamily::beta_ramp: {
      const double l = cutoff(x);
      const double beta = exponent(x);
      if (alpha < l || alpha > 1.0 - l) return 0.0;
      const double half = 0.5 - l;
      const double norm = 2.0 * std::pow(half, beta + 1.0) / (beta + 1.0);
      const double dist = alpha <= 0.5 ? alpha - l : 1.0 - alpha - l;
      return std::pow(dist, beta) / norm;
    }
  }
  return 0.0;
}

double DivisionKernel::cdf(double x, double u) const {
  switch (params_.family) {
    case KernelFamily::equal_mitosis:
      throw std::logic_error("equal mitosis kernel has no density");
    case KernelFamily::asymmetric_step:
      return std::clamp(2.0 * u, 0.0, 1.0);
    case KernelFamily::uniform:
    case KernelFamily::beta_ramp: {
      const double l = cutoff(x);
      const double beta = exponent(x);
      const double half = 0.5 - l;
      if (u < l) return 0.0;
      if (u <= 0.5) return 0.5 * std::pow((u - l) / half, beta + 1.0);
      if (u <= 1.0 - l) return 1.0 - 0.5 * std::pow((1.0 - u - l) / half, beta + 1.0);
      return 1.0;
    }
  }
  return 0.0;
}

double DivisionKernel::inverse_cdf(double x, double v) const {
  switch (params_.family) {
    case KernelFamily::equal_mitosis: return 0.5;
    case KernelFamily::asymmetric_step: return 0.5 * v;
    case KernelFamily::uniform:
    case KernelFamily::beta_ramp: {
      const double l = cutoff(x);
      const double power = 1.0 / (exponent(x) + 1.0);
      const double half = 0.5 - l;
      if (v <= 0.5) return half * std::pow(2.0 * v, power) + l;
      return 1.0 - l - half * std::pow(2.0 * (1.0 - v), power);
    }
  }
  return 0.5;
}

double DivisionKernel::inverse_cdf_dx(double x, double v) const {
  switch (params_.family) {
    case KernelFamily::equal_mitosis:
    case KernelFamily::asymmetric_step:
      return 0.0;
    case KernelFamily::uniform:
    case KernelFamily::beta_ramp: {
      const double l = cutoff(x);
      const double dl = cutoff_slope();
      const double beta = exponent(x);
      const double dbeta = exponent_slope();
      const double half = 0.5 - l;
      const double power = 1.0 / (beta + 1.0);
      const double dpower = -dbeta / ((beta + 1.0) * (beta + 1.0));
      if (v <= 0.5) {
        const double s = std::pow(2.0 * v, power);
        return (-dl + half * dpower * std::log(2.0 * v)) * s + dl;
      }
      const double s = std::pow(2.0 * (1.0 - v), power);
      return (dl - half * dpower * std::log(2.0 * (1.0 - v))) * s - dl;
    }
  }
  return 0.0;
}

MonotoneTable::MonotoneTable(std::vector<double> xs, std::vector<double> values)
    : xs_(std::move(xs)), values_(std::move(values)) {
  if (xs_.empty() || xs_.size() != values_.size())
    throw std::invalid_argument("MonotoneTable needs matching, non-empty abscissae and values");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("MonotoneTable abscissae must increase");
  if (xs_.size() >= 2) {
    x0_ = xs_.front();
    step_ = (xs_.back() - xs_.front()) / static_cast<double>(xs_.size() - 1);
    uniform_ = true;
    for (std::size_t i = 0; i < xs_.size() && uniform_; ++i)
      uniform_ = std::abs(xs_[i] - (x0_ + step_ * static_cast<double>(i))) <= 1e-12 * (1.0 + std::abs(xs_[i]));
  }
}

double MonotoneTable::operator()(double z) const {
  if (z <= xs_.front()) return values_.front();
  if (z >= xs_.back()) return values_.back();
  std::size_t j;
  if (uniform_) {
    j = static_cast<std::size_t>((z - x0_) / step_);
    j = std::min(j, xs_.size() - 2);
    // correct for rounding at knot boundaries
    if (z < xs_[j] && j > 0) --j;
    if (z > xs_[j + 1] && j + 2 < xs_.size()) ++j;
  } else {
    j = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), z) - xs_.begin()) - 1;
  }
  const double t = (z - xs_[j]) / (xs_[j + 1] - xs_[j]);
  return values_[j] + t * (values_[j + 1] - values_[j]);
}

AlphaRule alpha_rule(const DivisionKernel& kernel, double x) {
  AlphaRule rule;
  if (kernel.family() == KernelFamily::equal_mitosis) {
    rule.alpha = {0.5};
    rule.weight = {1.0};
    return rule;
  }
  const double lo = kernel.support_lo(x);
  const double hi = kernel.support_hi(x);
  const int intervals = kAlphaNodes - 1;
  const double step = (hi - lo) / intervals;
  rule.alpha.resize(kAlphaNodes);
  rule.weight.resize(kAlphaNodes);
  for (int k = 0; k < kAlphaNodes; ++k) {
    const double a = (k == intervals) ? hi : lo + step * k;
    const double simpson = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    rule.alpha[k] = a;
    rule.weight[k] = simpson * step / 3.0 * kernel.density(x, a);
  }
  // Exact normalization keeps constants fixed under the alpha-integral.
  double total = 0.0;
  for (double w : rule.weight) total += w;
  if (total > 0.0)
    for (double& w : rule.weight) w /= total;
  return rule;
}

double monotone_integral(const DivisionKernel& kernel, const MonotoneTable& f, double x) {
  const AlphaRule rule = alpha_rule(kernel, x);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.alpha.size(); ++k) {
    const double a = rule.alpha[k];
    sum += rule.weight[k] * f(a * x) * f((1.0 - a) * x);
  }
  return sum;
}

CouplingReport check_coupling(const DivisionKernel& kernel, std::span<const double> x_grid,
                              std::span<const double> u_grid, double slack) {
  CouplingReport report;
  const double mass = kernel.params().max_mass;

  std::vector<double> xs(x_grid.begin(), x_grid.end());
  std::sort(xs.begin(), xs.end());

  auto note = [](std::optional<CouplingViolation>& slot, bool& flag, CouplingViolation v) {
    flag = false;
    if (!slot) slot = std::move(v);
  };

  for (double u : u_grid) {
    std::vector<double> inv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) inv[i] = kernel.inverse_cdf(xs[i], u);

    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        ++report.pairs_checked;
        const double x = xs[i];
        const double y = xs[j];
        const double left = y * inv[j] - x * inv[i];
        const double right = y * (1.0 - inv[j]) - x * (1.0 - inv[i]);
        if (left < -slack)
          note(report.first_two_point_violation, report.two_point_pass,
               {x, y, u, -left, "x*Finv(x,u) <= y*Finv(y,u)"});
        if (right < -slack)
          note(report.first_two_point_violation, report.two_point_pass,
               {x, y, u, -right, "x*(1-Finv(x,u)) <= y*(1-Finv(y,u))"});
        const double literal = (1.0 - y / mass) * inv[j] - (1.0 - x / mass) * inv[i];
        if (literal < -slack)
          note(report.first_literal_violation, report.literal_pass,
               {x, y, u, -literal, "(1-x/M)*Finv(x,u) <= (1-y/M)*Finv(y,u)"});
      }
      const double slope = inv[i] + xs[i] * kernel.inverse_cdf_dx(xs[i], u);
      if (slope < -slack || slope > 1.0 + slack)
        note(report.first_differential_violation, report.differential_pass,
             {xs[i], xs[i], u, slope < 0.0 ? -slope : slope - 1.0,
              "0 <= Finv + x dFinv/dx <= 1"});
    }
  }
  report.passed = report.two_point_pass && report.differential_pass;
  return report;
}

}  // namespace gfd
