#pragma once

#include <functional>
#include <limits>

#include "gfd/model.hpp"

namespace gfd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Values of int_0^t b(S, A_u(x)) du and int_0^t (b(S, A_u(x)) + D) du.
struct RateIntegral {
  double division = 0.0;
  double total = 0.0;
};

struct EventTime {
  double time = 0.0;  // kInfinity when the clock never rings
  double mass = 0.0;  // mass reached at `time` (M if time is infinite)
  bool immortal() const { return time == kInfinity; }
};

struct FlowOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  /// Force the numerical path even when a closed form is available.
  bool force_ode = false;
};

/// Deterministic mass transport dx/dt = g(S, x) in a fixed environment S.
/// The logistic-Monod family uses closed forms; every other family goes
/// through an adaptive Dormand-Prince integration. Outputs stay in [0, M].
class GrowthFlow {
 public:
  GrowthFlow(const ModelDefinition& model, double S, FlowOptions options = {});

  double resource() const { return S_; }
  bool closed_form() const { return closed_form_; }

  /// A_t^S(x). flow(M, t) = M and flow(x, 0) = x.
  double flow(double x, double t) const;

  /// First time the trajectory from x reaches y; kInfinity when y >= M.
  /// Throws std::invalid_argument if y < x.
  double hitting_time(double x, double y) const;

  /// Both rate integrals along the trajectory from x over [0, t].
  RateIntegral cumulative_rate(double x, double t, double death_rate) const;

  /// Smallest T with cumulative_rate(x, T).total = E, found by bracket
  /// doubling and a bracketed root solve.
  EventTime event_time(double x, double exp_variate, double death_rate) const;

  /// Integral of `rate(z) / g(S, z)` over [x, y], computed in logit mass
  /// coordinates so that the vanishing of g at 0 and M is absorbed.
  double mass_integral(double x, double y, const std::function<double(double)>& rate) const;

 private:
  double flow_ode(double x, double t) const;
  RateIntegral cumulative_ode(double x, double t, double death_rate) const;
  double division_integral(double x, double y) const;

  ModelDefinition model_;
  double S_;
  FlowOptions options_;
  bool closed_form_;
  double rate_;  // mu(S) for the closed form
};

/// Logit coordinate xi = log(x / (M - x)) and its inverse.
double to_logit(double x, double max_mass);
double from_logit(double xi, double max_mass);

}  // namespace gfd
