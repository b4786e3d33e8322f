#pragma once

#include <vector>

#include "gfd/model.hpp"

namespace gfd {

/// Tabulated event clock for one (S, D) pair.
///
/// Along the flow, int_0^T (b + D)(A_u(x)) du equals the mass integral
/// int_x^{A_T(x)} (b + D) / g dz. The clock tabulates that integral (and the
/// elapsed-time integral int dz / g) in logit mass coordinates, where both
/// integrands stay bounded, so an event draw is a table lookup followed by a
/// safeguarded Newton solve inside one cell. Within a cell the integrals are
/// evaluated with 8-point Gauss-Legendre, split at m_div.
class HazardClock {
 public:
  struct Event {
    double mass = 0.0;
    double elapsed = 0.0;
    bool immortal = false;
  };

  HazardClock(const ModelDefinition& model, double S, double death_rate, std::size_t cells = 4096);

  /// Mass and elapsed time at which the cumulative hazard from x reaches E.
  Event next_event(double x, double exp_variate) const;

  /// Time for the flow to carry x to y (y >= x).
  double elapsed(double x, double y) const;

  /// A_t(x) via the elapsed-time table.
  double advance(double x, double t) const;

  double resource() const { return S_; }
  double death_rate() const { return D_; }

 private:
  enum class Kind { hazard, time };

  double integrand(Kind kind, double xi) const;
  double integrate(Kind kind, double a, double b) const;
  double cumulative(Kind kind, double xi) const;
  double solve(Kind kind, double target) const;
  double clamp_logit(double x) const;

  ModelDefinition model_;
  double S_;
  double D_;
  double lo_;
  double hi_;
  double step_;
  double split_;  // logit of m_div, or NaN when m_div = 0
  bool hazard_near_top_;
  std::vector<double> hazard_;
  std::vector<double> time_;
};

}  // namespace gfd
