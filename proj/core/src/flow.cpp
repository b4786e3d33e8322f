#include "gfd/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace gfd {

namespace {

using State = std::array<double, 2>;  // mass, int b du

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12, &error);
}

}  // namespace

double to_logit(double x, double max_mass) { return std::log(x / (max_mass - x)); }

double from_logit(double xi, double max_mass) {
  if (xi >= 0.0) return max_mass / (1.0 + std::exp(-xi));
  const double e = std::exp(xi);
  return max_mass * e / (1.0 + e);
}

GrowthFlow::GrowthFlow(const ModelDefinition& model, double S, FlowOptions options)
    : model_(model),
      S_(S),
      options_(options),
      closed_form_(model.growth.logistic() && !options.force_ode),
      rate_(model.growth.mu(S)) {}

double GrowthFlow::flow(double x, double t) const {
  const double M = model_.max_mass;
  if (t <= 0.0 || x <= 0.0 || x >= M) return std::clamp(x, 0.0, M);
  if (!closed_form_) return flow_ode(x, t);
  // M x e^{rt} / (M + x (e^{rt} - 1)), written to avoid overflow
  const double decay = std::exp(-rate_ * t);
  return std::min(M, M / (1.0 + (M - x) / x * decay));
}

double GrowthFlow::flow_ode(double x, double t) const {
  namespace odeint = boost::numeric::odeint;
  const double M = model_.max_mass;
  const double cap = M * (1.0 - std::numeric_limits<double>::epsilon());
  State state{x, 0.0};
  auto rhs = [&](const State& s, State& ds, double) {
    const double m = std::clamp(s[0], 0.0, cap);
    ds[0] = model_.g(S_, m);
    ds[1] = 0.0;
  };
  auto stepper = odeint::make_controlled(options_.abs_tol, options_.rel_tol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, state, 0.0, t, std::min(t, 1e-3));
  return std::clamp(state[0], x, cap);
}

double GrowthFlow::mass_integral(double x, double y, const std::function<double(double)>& rate) const {
  const double M = model_.max_mass;
  if (!(y > x)) return 0.0;
  if (y >= M) y = M * (1.0 - 1e-15);
  const double a = to_logit(x, M);
  const double b = to_logit(y, M);
  auto integrand = [&](double xi) {
    const double z = from_logit(xi, M);
    const double r = rate(z);
    if (r == 0.0) return 0.0;
    const double jac = z * (M - z) / M;
    const double g = model_.g(S_, z);
    if (g <= 0.0) return std::numeric_limits<double>::infinity();
    return r * jac / g;
  };
  const double md = model_.division.m_div();
  if (md > x && md < y) {
    const double c = to_logit(md, M);
    return gk_integrate(integrand, a, c) + gk_integrate(integrand, c, b);
  }
  return gk_integrate(integrand, a, b);
}

double GrowthFlow::hitting_time(double x, double y) const {
  const double M = model_.max_mass;
  if (y < x) throw std::invalid_argument("target below initial mass");
  if (y >= M) return kInfinity;
  if (y == x) return 0.0;
  if (rate_ <= 0.0) return kInfinity;
  if (closed_form_) return std::log(y * (M - x) / (x * (M - y))) / rate_;
  return mass_integral(x, y, [](double) { return 1.0; });
}

double GrowthFlow::division_integral(double x, double y) const {
  return mass_integral(x, y, [this](double z) { return model_.b(S_, z); });
}

RateIntegral GrowthFlow::cumulative_rate(double x, double t, double death_rate) const {
  if (t <= 0.0) return {};
  const double M = model_.max_mass;
  if (x >= M || x <= 0.0 || rate_ <= 0.0) {
    const double b = model_.b(S_, std::clamp(x, 0.0, M)) * t;
    return {b, b + death_rate * t};
  }
  if (!closed_form_) return cumulative_ode(x, t, death_rate);
  const double y = flow(x, t);
  if (y >= M) {
    // the state is numerically pinned at M; integrate up to where it got pinned
    return cumulative_ode(x, t, death_rate);
  }
  const double b = division_integral(x, y);
  return {b, b + death_rate * t};
}

RateIntegral GrowthFlow::cumulative_ode(double x, double t, double death_rate) const {
  namespace odeint = boost::numeric::odeint;
  const double M = model_.max_mass;
  const double cap = M * (1.0 - std::numeric_limits<double>::epsilon());
  State state{x, 0.0};
  auto rhs = [&](const State& s, State& ds, double) {
    const double m = std::clamp(s[0], 0.0, cap);
    ds[0] = model_.g(S_, m);
    ds[1] = model_.b(S_, m);
  };
  auto stepper = odeint::make_controlled(options_.abs_tol, options_.rel_tol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, state, 0.0, t, std::min(t, 1e-3));
  const double b = std::max(0.0, state[1]);
  return {b, b + death_rate * t};
}

EventTime GrowthFlow::event_time(double x, double exp_variate, double death_rate) const {
  const double M = model_.max_mass;
  if (exp_variate <= 0.0) return {0.0, x};
  const bool grows = rate_ > 0.0 && x < M;
  const bool hazard_ahead = death_rate > 0.0 || model_.b(S_, x) > 0.0 ||
                            (grows && model_.division.eventually_positive());
  if (!hazard_ahead) return {kInfinity, grows ? M : x};

  auto clock = [&](double T) { return cumulative_rate(x, T, death_rate).total - exp_variate; };

  double lo = 0.0;
  const double start_rate = model_.b(S_, x) + death_rate;
  double hi = start_rate > 0.0 ? exp_variate / start_rate : 1.0;
  double f_hi = clock(hi);
  int doublings = 0;
  while (f_hi < 0.0) {
    lo = hi;
    hi *= 2.0;
    f_hi = clock(hi);
    if (++doublings > 200) return {kInfinity, M};
  }
  if (f_hi == 0.0) return {hi, flow(x, hi)};

  boost::uintmax_t max_iter = 200;
  const double scale = 1e-12 * (1.0 + exp_variate);
  auto done = [&](double a, double b) {
    return std::abs(b - a) <= 1e-15 * std::max(1.0, b) || std::abs(clock(0.5 * (a + b))) <= scale;
  };
  const auto bracket =
      boost::math::tools::toms748_solve(clock, lo, hi, clock(lo), f_hi, done, max_iter);
  const double T = 0.5 * (bracket.first + bracket.second);
  return {T, flow(x, T)};
}

}  // namespace gfd
