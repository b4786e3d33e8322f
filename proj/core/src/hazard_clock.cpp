#include "gfd/hazard_clock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "gfd/flow.hpp"

namespace gfd {

namespace {

constexpr std::array<double, 4> kGaussNode{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
constexpr std::array<double, 4> kGaussWeight{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                             0.1012285362903763};

// Logit window; from_logit(36) is still strictly below M in double precision.
constexpr double kLogitLo = -40.0;
constexpr double kLogitHi = 36.0;

}  // namespace

HazardClock::HazardClock(const ModelDefinition& model, double S, double death_rate, std::size_t cells)
    : model_(model), S_(S), D_(death_rate), lo_(kLogitLo), hi_(kLogitHi) {
  if (cells < 16) throw std::invalid_argument("HazardClock needs at least 16 cells");
  if (!(model_.g(S_, 0.5 * model_.max_mass) > 0.0))
    throw std::invalid_argument("HazardClock: growth speed vanishes in the interior");
  step_ = (hi_ - lo_) / static_cast<double>(cells);
  const double md = model_.division.m_div();
  split_ = md > 0.0 ? to_logit(md, model_.max_mass) : std::nan("");
  hazard_near_top_ = D_ > 0.0 || model_.division.eventually_positive();

  hazard_.assign(cells + 1, 0.0);
  time_.assign(cells + 1, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    const double a = lo_ + step_ * static_cast<double>(k);
    const double b = a + step_;
    hazard_[k + 1] = hazard_[k] + integrate(Kind::hazard, a, b);
    time_[k + 1] = time_[k] + integrate(Kind::time, a, b);
  }
}

double HazardClock::integrand(Kind kind, double xi) const {
  const double M = model_.max_mass;
  const double z = from_logit(xi, M);
  const double jac = z * (M - z) / M;
  const double g = model_.g(S_, z);
  const double rate = kind == Kind::time ? 1.0 : model_.b(S_, z) + D_;
  if (rate == 0.0) return 0.0;
  return rate * jac / g;
}

double HazardClock::integrate(Kind kind, double a, double b) const {
  if (!(b > a)) return 0.0;
  if (kind == Kind::hazard && split_ > a && split_ < b)
    return integrate(kind, a, split_) + integrate(kind, split_, b);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNode.size(); ++i) {
    const double d = half * kGaussNode[i];
    sum += kGaussWeight[i] * (integrand(kind, mid - d) + integrand(kind, mid + d));
  }
  return sum * half;
}

double HazardClock::clamp_logit(double x) const {
  const double M = model_.max_mass;
  if (x <= 0.0) return lo_;
  if (x >= M) return hi_;
  return std::clamp(to_logit(x, M), lo_, hi_);
}

double HazardClock::cumulative(Kind kind, double xi) const {
  const auto& table = kind == Kind::hazard ? hazard_ : time_;
  const std::size_t cells = table.size() - 1;
  std::size_t k = static_cast<std::size_t>(std::max(0.0, (xi - lo_) / step_));
  k = std::min(k, cells - 1);
  const double a = lo_ + step_ * static_cast<double>(k);
  return table[k] + (xi >= a ? integrate(kind, a, xi) : -integrate(kind, xi, a));
}

double HazardClock::solve(Kind kind, double target) const {
  const auto& table = kind == Kind::hazard ? hazard_ : time_;
  const std::size_t cells = table.size() - 1;
  if (target >= table[cells]) return hi_;
  if (target <= table[0]) return lo_;
  std::size_t j = static_cast<std::size_t>(std::upper_bound(table.begin(), table.end(), target) - table.begin());
  j = std::clamp<std::size_t>(j, 1, cells) - 1;
  double a = lo_ + step_ * static_cast<double>(j);
  double b = a + step_;
  const double base = table[j];
  const double span = table[j + 1] - base;
  const double residual = target - base;
  double xi = span > 0.0 ? a + step_ * std::clamp(residual / span, 0.0, 1.0) : a;
  const double left = a;
  for (int it = 0; it < 60; ++it) {
    const double f = integrate(kind, left, xi) - residual;
    const double slope = integrand(kind, xi);
    const double step = slope > 0.0 ? f / slope : kInfinity;
    // Newton is quadratic here, so a 1e-13 step leaves an error far below it.
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(xi))) return std::clamp(xi - step, left, left + step_);
    if (f > 0.0) b = xi; else a = xi;
    double next = xi - step;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (b - a <= 1e-15 * (1.0 + std::abs(a))) return next;
    xi = next;
  }
  return xi;
}

HazardClock::Event HazardClock::next_event(double x, double exp_variate) const {
  const double xi0 = clamp_logit(x);
  if (exp_variate <= 0.0) return {x, 0.0, false};
  const double target = cumulative(Kind::hazard, xi0) + exp_variate;
  if (target >= hazard_.back() && !hazard_near_top_) return {model_.max_mass, kInfinity, true};
  const double xi = std::max(xi0, solve(Kind::hazard, target));
  const double t = cumulative(Kind::time, xi) - cumulative(Kind::time, xi0);
  return {std::max(x, from_logit(xi, model_.max_mass)), std::max(0.0, t), false};
}

double HazardClock::elapsed(double x, double y) const {
  if (y < x) throw std::invalid_argument("target below initial mass");
  if (y >= model_.max_mass) return kInfinity;
  return std::max(0.0, cumulative(Kind::time, clamp_logit(y)) - cumulative(Kind::time, clamp_logit(x)));
}

double HazardClock::advance(double x, double t) const {
  if (t <= 0.0 || x >= model_.max_mass) return x;
  const double xi0 = clamp_logit(x);
  const double xi = std::max(xi0, solve(Kind::time, cumulative(Kind::time, xi0) + t));
  return std::max(x, from_logit(xi, model_.max_mass));
}

}  // namespace gfd
