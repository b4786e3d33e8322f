#include "gfd/benchmark_models.hpp"

#include <algorithm>
#include <stdexcept>

namespace gfd {

std::string to_string(OracleTag tag) {
  switch (tag) {
    case OracleTag::galton_watson: return "GALTON_WATSON";
    case OracleTag::mass_balance: return "MASS_BALANCE";
    case OracleTag::none: break;
  }
  return "NONE";
}

double gw_extinction_oracle(double b_bar, double death_rate) {
  if (!(b_bar > 0.0)) throw std::invalid_argument("gw_extinction_oracle needs b_bar > 0");
  return std::min(1.0, death_rate / b_bar);
}

double mass_balance_lambda_oracle(double b_bar, double death_rate) { return b_bar - death_rate; }

namespace {

RunConfig finish(RunConfig cfg, std::string source) {
  cfg.model.division_bound = certified_division_bound(cfg.model.division, cfg.env.resource, cfg.model.max_mass);
  cfg.source = std::move(source);
  return cfg;
}

}  // namespace

RunConfig logramp_config() {
  RunConfig cfg;
  auto& m = cfg.model;
  m.max_mass = 1.0;
  m.death_rate = 0.3;
  m.growth = GrowthModel::logistic_monod(1.0, 2.0, 1.0);
  m.division = DivisionRateModel::ramp(1.0, 4.0, 0.2, 1.0);
  m.kernel = DivisionKernel::uniform(1.0, 0.25);
  cfg.env.resource = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  cfg.env.death = {0.3, 0.6, 1.0, 1.5};
  // deep enough for the near-critical cells (S=16, D=1)
  cfg.sim.gen_limit = 2000;
  return finish(cfg, "builtin:LOGRAMP");
}

RunConfig constant_rate_config(double b_bar, double death_rate) {
  RunConfig cfg;
  auto& m = cfg.model;
  m.max_mass = 1.0;
  m.death_rate = death_rate;
  m.growth = GrowthModel::logistic_monod(1.0, 1.0, 0.0);
  m.division = DivisionRateModel::constant(1.0, b_bar, 0.0);
  m.kernel = DivisionKernel::uniform(1.0, 0.25);
  cfg.env.resource = {1.0};
  cfg.env.death = {death_rate};
  return finish(cfg, "builtin:CONSTANT");
}

std::vector<std::string> builtin_names() {
  return {"LOGRAMP", "CONSTANT", "CONSTANT_RATIOS", "COUPLING_VIOLATION", "DECREASING", "ASYMMETRIC"};
}

std::optional<NamedModel> find_builtin(std::string_view name) {
  NamedModel out;
  out.name = std::string(name);
  if (name == "LOGRAMP") {
    out.config = logramp_config();
  } else if (name == "CONSTANT") {
    out.config = constant_rate_config(2.0, 1.0);
    out.oracle = OracleTag::galton_watson;
  } else if (name == "CONSTANT_RATIOS") {
    // b / D in {2, 1.1, 0.9, 0.5}.
    out.config = constant_rate_config(1.0, 0.5);
    out.config.env.death = {0.5, 1.0 / 1.1, 1.0 / 0.9, 2.0};
    out.config.source = "builtin:CONSTANT_RATIOS";
    out.oracle = OracleTag::galton_watson;
  } else if (name == "COUPLING_VIOLATION") {
    out.config = logramp_config();
    out.config.model.kernel = DivisionKernel({KernelFamily::uniform, 1.0, 0.45, -0.45, 0.0, 0.0});
    out.config.source = "builtin:COUPLING_VIOLATION";
  } else if (name == "DECREASING") {
    out.config = logramp_config();
    out.config.model.division =
        DivisionRateModel({DivisionFamily::decreasing, 1.0, 4.0, 0.2, 1.0, 0.0});
    out.config = finish(out.config, "builtin:DECREASING");
  } else if (name == "ASYMMETRIC") {
    out.config = logramp_config();
    out.config.model.kernel = DivisionKernel::asymmetric_step(1.0);
    out.config.source = "builtin:ASYMMETRIC";
  } else {
    return std::nullopt;
  }
  if (out.oracle == OracleTag::galton_watson) {
    const double b = out.config.model.division.params().b_max;
    const double D = out.config.model.death_rate;
    out.expected_extinction = gw_extinction_oracle(b, D);
    out.expected_lambda = mass_balance_lambda_oracle(b, D);
  }
  return out;
}

}  // namespace gfd
