#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gfd/kernel.hpp"

namespace gfd {

enum class GrowthFamily { logistic_monod, separable_table };

std::string to_string(GrowthFamily family);
std::optional<GrowthFamily> growth_family_from_string(const std::string& tag);

/// Growth speed of the form g(S, x) = mu(S) * shape(x).
///
/// logistic_monod: mu(S) = mu_max * S / (K + S), shape(x) = x (1 - x / M).
/// separable_table: mu and shape are piecewise-linear tables; shape must
/// vanish at 0 and M.
class GrowthModel {
 public:
  struct Params {
    GrowthFamily family = GrowthFamily::logistic_monod;
    double max_mass = 1.0;
    double mu_max = 1.0;
    double half_saturation = 0.0;
    std::vector<double> mu_s;
    std::vector<double> mu_values;
    std::vector<double> shape_x;
    std::vector<double> shape_values;
  };

  GrowthModel() = default;
  explicit GrowthModel(Params params);

  static GrowthModel logistic_monod(double max_mass, double mu_max, double half_saturation);

  double speed(double S, double x) const { return mu(S) * shape(x); }
  double mu(double S) const;
  double shape(double x) const;

  bool logistic() const { return params_.family == GrowthFamily::logistic_monod; }
  const Params& params() const { return params_; }
  double max_mass() const { return params_.max_mass; }

 private:
  Params params_{};
};

enum class DivisionFamily {
  constant,    // b_max * 1{x > m_div}
  ramp,        // b_max * ((x - m_div) / (M - m_div))^gamma above m_div
  decreasing,  // b_max * (1 - (x - m_div) / (M - m_div))^gamma above m_div
};

std::string to_string(DivisionFamily family);
std::optional<DivisionFamily> division_family_from_string(const std::string& tag);

/// Division rate b(S, x) = resource_factor(S) * shape(x). The resource factor
/// is S / (s_half + S) when s_half > 0 and 1 otherwise.
class DivisionRateModel {
 public:
  struct Params {
    DivisionFamily family = DivisionFamily::constant;
    double max_mass = 1.0;
    double b_max = 1.0;
    double m_div = 0.0;
    double gamma = 1.0;
    double s_half = 0.0;
  };

  DivisionRateModel() = default;
  explicit DivisionRateModel(Params params);

  static DivisionRateModel constant(double max_mass, double b_max, double m_div);
  static DivisionRateModel ramp(double max_mass, double b_max, double m_div, double gamma = 1.0);

  double rate(double S, double x) const;
  double resource_factor(double S) const;
  /// True when b(S, .) is not identically zero near M.
  bool eventually_positive() const { return params_.b_max > 0.0 && params_.m_div < params_.max_mass; }

  const Params& params() const { return params_; }
  double m_div() const { return params_.m_div; }

 private:
  Params params_{};
};

struct ModelDefinition {
  double max_mass = 1.0;
  double death_rate = 0.0;
  GrowthModel growth;
  DivisionRateModel division;
  DivisionKernel kernel;
  /// Certified upper bound of b over the probe grid.
  double division_bound = 0.0;

  double g(double S, double x) const { return growth.speed(S, x); }
  double b(double S, double x) const { return division.rate(S, x); }
};

/// Computes 1.001 * max b(S, x) over a probe grid of S values and x points.
double certified_division_bound(const DivisionRateModel& division, const std::vector<double>& s_values,
                                double max_mass, int probe = 64);

struct EnvironmentRange {
  std::vector<double> resource;  // S ladder, strictly increasing
  std::vector<double> death;     // D ladder, strictly increasing
};

struct SolverSettings {
  std::size_t grid = 512;
  double tol = 1e-8;
  std::size_t max_generations = 10000;
  bool from_above = false;
  double from_above_offset = 1e-3;
  double eigen_tol = 1e-9;
  std::size_t eigen_max_iterations = 400000;
  std::size_t probe = 64;
  double epsilon_lambda = 1e-4;
  double epsilon_p = 1e-4;
  double monotone_slack = 1e-8;
};

struct SimulationSettings {
  std::size_t trials = 10000;
  std::uint64_t seed = 20240917;
  std::size_t gen_limit = 200;
  std::size_t pop_cap = 10000;
  double time_horizon = std::numeric_limits<double>::infinity();
  std::size_t threads = 4;
  std::vector<double> checkpoints{0.5, 1.0, 2.0};
};

struct RunConfig {
  ModelDefinition model;
  EnvironmentRange env;
  SolverSettings solver;
  SimulationSettings sim;
  double x0 = 0.5;
  std::string source;
};

}  // namespace gfd
