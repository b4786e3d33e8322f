#include "gfd/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gfd {

namespace {

double table_lookup(const std::vector<double>& xs, const std::vector<double>& ys, double z) {
  if (z <= xs.front()) return ys.front();
  if (z >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), z);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (z - xs[j]) / (xs[j + 1] - xs[j]);
  return ys[j] + t * (ys[j + 1] - ys[j]);
}

void require_table(const std::vector<double>& xs, const std::vector<double>& ys, const char* what) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw std::invalid_argument(std::string(what) + ": need at least two knots and matching values");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument(std::string(what) + ": knots must increase");
}

}  // namespace

std::string to_string(GrowthFamily family) {
  return family == GrowthFamily::logistic_monod ? "logistic_monod" : "separable_table";
}

std::optional<GrowthFamily> growth_family_from_string(const std::string& tag) {
  if (tag == "logistic_monod") return GrowthFamily::logistic_monod;
  if (tag == "separable_table") return GrowthFamily::separable_table;
  return std::nullopt;
}

GrowthModel::GrowthModel(Params params) : params_(std::move(params)) {
  if (!(params_.max_mass > 0.0)) throw std::invalid_argument("growth max_mass must be positive");
  if (params_.family == GrowthFamily::logistic_monod) {
    if (!(params_.mu_max > 0.0)) throw std::invalid_argument("mu_max must be positive");
    if (params_.half_saturation < 0.0) throw std::invalid_argument("half_saturation must be >= 0");
  } else {
    require_table(params_.mu_s, params_.mu_values, "growth mu table");
    require_table(params_.shape_x, params_.shape_values, "growth shape table");
  }
}

GrowthModel GrowthModel::logistic_monod(double max_mass, double mu_max, double half_saturation) {
  Params p;
  p.family = GrowthFamily::logistic_monod;
  p.max_mass = max_mass;
  p.mu_max = mu_max;
  p.half_saturation = half_saturation;
  return GrowthModel(std::move(p));
}

double GrowthModel::mu(double S) const {
  if (params_.family == GrowthFamily::logistic_monod)
    return params_.mu_max * S / (params_.half_saturation + S);
  return table_lookup(params_.mu_s, params_.mu_values, S);
}

double GrowthModel::shape(double x) const {
  const double m = params_.max_mass;
  if (x <= 0.0 || x >= m) return 0.0;
  if (params_.family == GrowthFamily::logistic_monod) return x * (1.0 - x / m);
  return table_lookup(params_.shape_x, params_.shape_values, x);
}

std::string to_string(DivisionFamily family) {
  switch (family) {
    case DivisionFamily::constant: return "constant";
    case DivisionFamily::ramp: return "ramp";
    case DivisionFamily::decreasing: return "decreasing";
  }
  return "unknown";
}

std::optional<DivisionFamily> division_family_from_string(const std::string& tag) {
  if (tag == "constant") return DivisionFamily::constant;
  if (tag == "ramp") return DivisionFamily::ramp;
  if (tag == "decreasing") return DivisionFamily::decreasing;
  return std::nullopt;
}

DivisionRateModel::DivisionRateModel(Params params) : params_(params) {
  if (!(params_.max_mass > 0.0)) throw std::invalid_argument("division max_mass must be positive");
  if (params_.b_max < 0.0) throw std::invalid_argument("b_max must be >= 0");
  if (!(params_.m_div >= 0.0 && params_.m_div < params_.max_mass))
    throw std::invalid_argument("m_div must lie in [0,M)");
  if (!(params_.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (params_.s_half < 0.0) throw std::invalid_argument("s_half must be >= 0");
}

DivisionRateModel DivisionRateModel::constant(double max_mass, double b_max, double m_div) {
  return DivisionRateModel(Params{DivisionFamily::constant, max_mass, b_max, m_div, 1.0, 0.0});
}

DivisionRateModel DivisionRateModel::ramp(double max_mass, double b_max, double m_div, double gamma) {
  return DivisionRateModel(Params{DivisionFamily::ramp, max_mass, b_max, m_div, gamma, 0.0});
}

double DivisionRateModel::resource_factor(double S) const {
  if (params_.s_half > 0.0) return S / (params_.s_half + S);
  return 1.0;
}

double DivisionRateModel::rate(double S, double x) const {
  const auto& p = params_;
  if (x <= p.m_div) return 0.0;
  double shape = 0.0;
  switch (p.family) {
    case DivisionFamily::constant:
      shape = 1.0;
      break;
    case DivisionFamily::ramp: {
      const double t = std::min(1.0, (x - p.m_div) / (p.max_mass - p.m_div));
      shape = p.gamma == 1.0 ? t : std::pow(t, p.gamma);
      break;
    }
    case DivisionFamily::decreasing: {
      const double t = std::max(0.0, 1.0 - (x - p.m_div) / (p.max_mass - p.m_div));
      shape = p.gamma == 1.0 ? t : std::pow(t, p.gamma);
      break;
    }
  }
  return p.b_max * shape * resource_factor(S);
}

double certified_division_bound(const DivisionRateModel& division, const std::vector<double>& s_values,
                                double max_mass, int probe) {
  double best = 0.0;
  for (double S : s_values) {
    for (int i = 0; i <= probe; ++i) {
      const double x = max_mass * static_cast<double>(i) / probe;
      best = std::max(best, division.rate(S, x));
    }
  }
  return 1.001 * best;
}

}  // namespace gfd
