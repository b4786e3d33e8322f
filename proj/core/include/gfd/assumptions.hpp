#pragma once

#include <string>
#include <vector>

#include "gfd/kernel.hpp"
#include "gfd/model.hpp"

namespace gfd {

struct AssumptionCheck {
  std::string label;
  bool passed = true;
  /// Gating checks decide which theorem-based experiments are asserted.
  bool gating = true;
  std::string detail;
};

/// Sampled verification of the standing model hypotheses on a tensor grid
/// of (S, x, alpha). Failures are report entries, never exceptions.
struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  CouplingReport coupling;
  /// Largest sampled kernel density; infinite for equal mitosis.
  double empirical_q_bar = 0.0;

  bool kernel_ok = true;            // symmetry, normalization, bounded density
  bool growth_ok = true;            // zeros at 0 and M, positive inside
  bool division_bounds_ok = true;   // 0 <= b <= b_bar, threshold at m_div
  bool coupling_ok = true;          // offspring ordering (two-point + differential)
  bool division_monotone_x = true;  // b non-decreasing in x
  bool division_monotone_s = true;  // b non-decreasing in S
  bool growth_monotone_s = true;    // g non-decreasing in S
  bool ratio_monotone_s = true;     // b / g non-increasing in S

  bool standing() const { return kernel_ok && growth_ok && division_bounds_ok; }
  /// Gate for "p non-increasing in x".
  bool mass_ordering() const { return standing() && coupling_ok && division_monotone_x; }
  /// Gate for "p non-decreasing in D".
  bool death_ordering() const { return standing(); }
  /// Gate for "p non-increasing in S" and "Lambda non-decreasing in S".
  bool resource_ordering() const {
    return standing() && coupling_ok && division_monotone_x && division_monotone_s && growth_monotone_s &&
           ratio_monotone_s;
  }
  /// True when every gating check passed.
  bool all_passed() const;

  /// One line per check: "PASS|FAIL  label  detail".
  std::string render() const;
};

/// Probe sizes must be at least 16. `slack` applies to monotonicity
/// comparisons, `equality_tol` to symmetry and normalization.
AssumptionReport validate_assumptions(const ModelDefinition& model, const EnvironmentRange& env,
                                      std::size_t x_probe = 64, std::size_t alpha_probe = 64,
                                      double slack = 1e-12, double equality_tol = 1e-10);

}  // namespace gfd
