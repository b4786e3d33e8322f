#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfd/model.hpp"

namespace gfd {

enum class OracleTag { galton_watson, mass_balance, none };

std::string to_string(OracleTag tag);

struct NamedModel {
  std::string name;
  RunConfig config;
  OracleTag oracle = OracleTag::none;
  /// Closed-form expectations, recomputed from the model on every lookup.
  std::optional<double> expected_extinction;
  std::optional<double> expected_lambda;
};

/// Minimal root of D + b q^2 = (D + b) q, i.e. min(1, D / b).
/// Throws std::invalid_argument unless b > 0.
double gw_extinction_oracle(double b_bar, double death_rate);

/// Growth rate of total mass under a constant division rate: b - D.
double mass_balance_lambda_oracle(double b_bar, double death_rate);

/// Logistic growth, ramp division above 0.2, uniform kernel with l = 0.25,
/// 8 resource levels x 4 death rates.
RunConfig logramp_config();

/// Constant division rate b_bar with no threshold, logistic growth.
RunConfig constant_rate_config(double b_bar, double death_rate);

/// Names accepted by find_builtin.
std::vector<std::string> builtin_names();

std::optional<NamedModel> find_builtin(std::string_view name);

}  // namespace gfd
