#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gfd/kernel.hpp"
#include "gfd/random.hpp"
#include "oracles.hpp"

namespace {

const gfd::DivisionKernel kUniform = gfd::DivisionKernel::uniform(1.0, 0.25);
const gfd::DivisionKernel kRamp = gfd::DivisionKernel::beta_ramp(1.0, 0.25, 5.0);

double ramp_density_integral(double x, double a, double b) {
  // density is smooth on each side of 1/2
  auto f = [x](double alpha) { return kRamp.density(x, alpha); };
  if (b <= 0.5) return oracle::simpson(f, a, b, 4000);
  if (a >= 0.5) return oracle::simpson(f, a, b, 4000);
  return oracle::simpson(f, a, 0.5, 4000) + oracle::simpson(f, 0.5, b, 4000);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace

TEST_CASE("uniform density is 2 on [0.25, 0.75]") {
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(kUniform.density(x, 0.25) == 2.0);
    CHECK(kUniform.density(x, 0.5) == 2.0);
    CHECK(kUniform.density(x, 0.75) == 2.0);
    CHECK(kUniform.density(x, 0.2) == 0.0);
    CHECK(kUniform.density(x, 0.8) == 0.0);
  }
}

TEST_CASE("densities are symmetric") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = unit(gen);
    const double a = unit(gen);
    CHECK(kUniform.density(x, a) == doctest::Approx(kUniform.density(x, 1 - a)).epsilon(1e-14));
    CHECK(kRamp.density(x, a) == doctest::Approx(kRamp.density(x, 1 - a)).epsilon(1e-12));
  }
}

TEST_CASE("beta ramp density integrates to 1") {
  for (double x : {0.2, 0.8}) CHECK(std::abs(ramp_density_integral(x, 0.0, 1.0) - 1.0) < 1e-10);
}

TEST_CASE("cdf") {
  for (const auto* k : {&kUniform, &kRamp}) {
    for (double x : {0.1, 0.6}) {
      CHECK(k->cdf(x, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(k->cdf(x, k->cutoff(x)) == 0.0);
      CHECK(k->cdf(x, 1.0) == 1.0);
      double last = 0.0;
      for (double u : linspace(0.0, 1.0, 101)) {
        CHECK(k->cdf(x, u) >= last);
        last = k->cdf(x, u);
      }
    }
  }
  CHECK(std::abs(kRamp.cdf(0.5, 0.4) - ramp_density_integral(0.5, 0.25, 0.4)) < 1e-10);
  CHECK(std::abs(kRamp.cdf(0.5, 0.7) - ramp_density_integral(0.5, 0.25, 0.7)) < 1e-10);
}

TEST_CASE("inverse cdf") {
  for (double x : {0.1, 0.6}) {
    CHECK(kUniform.inverse_cdf(x, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(kRamp.inverse_cdf(x, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    for (double v : {0.01, 0.3, 0.77}) CHECK(kUniform.inverse_cdf(x, v) == doctest::Approx((1 - 2 * v) * 0.25 + v));
  }
  for (const auto* k : {&kUniform, &kRamp})
    for (double v : linspace(1.0 / 65, 64.0 / 65, 64)) CHECK(std::abs(k->cdf(0.4, k->inverse_cdf(0.4, v)) - v) < 1e-10);
}

TEST_CASE("inverse cdf slope matches finite differences for a mass-dependent cutoff") {
  gfd::DivisionKernel::Params p;
  p.family = gfd::KernelFamily::beta_ramp;
  p.l0 = 0.1;
  p.l1 = 0.2;
  p.beta0 = 1.0;
  p.beta1 = 2.0;
  const gfd::DivisionKernel k(p);
  const double h = 1e-6;
  for (double x : {0.2, 0.5}) {
    for (double v : {0.1, 0.45, 0.8}) {
      const double fd = (k.inverse_cdf(x + h, v) - k.inverse_cdf(x - h, v)) / (2 * h);
      CHECK(k.inverse_cdf_dx(x, v) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("sampling") {
  CHECK(kUniform.sample(0.3, 0.5) == 0.5);
  double last = 0.0;
  for (double u : linspace(0.001, 0.999, 200)) {
    CHECK(kRamp.sample(0.3, u) >= last);
    last = kRamp.sample(0.3, u);
  }

  // Kolmogorov-Smirnov against the analytic uniform CDF, 5% level
  const std::size_t n = 100000;
  gfd::RandomStream rng(11, 0, 0);
  std::vector<double> draws(n);
  for (auto& d : draws) d = kUniform.sample(0.4, rng.uniform());
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = std::clamp((draws[i] - 0.25) / 0.5, 0.0, 1.0);
    ks = std::max({ks, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("equal mitosis has no density") {
  const auto k = gfd::DivisionKernel::equal_mitosis(1.0);
  CHECK_FALSE(k.has_density());
  CHECK_THROWS_AS(k.density(0.5, 0.5), std::logic_error);
  CHECK(k.sample(0.5, 0.1) == 0.5);
  const auto rule = gfd::alpha_rule(k, 0.5);
  REQUIRE(rule.alpha.size() == 1);
  CHECK(rule.alpha[0] == 0.5);
  CHECK(rule.weight[0] == 1.0);
}

TEST_CASE("asymmetric step kernel") {
  const auto k = gfd::DivisionKernel::asymmetric_step(1.0);
  CHECK(k.density(0.5, 0.2) == 2.0);
  CHECK(k.density(0.5, 0.8) == 0.0);
}

TEST_CASE("coupling holds for constant cutoffs") {
  const auto xs = linspace(0.01, 0.99, 64);
  const auto us = linspace(0.01, 0.99, 32);
  for (const auto* k : {&kUniform, &kRamp}) {
    const auto report = gfd::check_coupling(*k, xs, us);
    CHECK(report.passed);
    CHECK(report.two_point_pass);
    CHECK(report.differential_pass);
  }
}

TEST_CASE("coupling fails for a steeply decreasing cutoff") {
  gfd::DivisionKernel::Params p;
  p.l0 = 0.45;
  p.l1 = -0.45;
  const gfd::DivisionKernel k(p);
  const auto xs = linspace(0.01, 0.99, 64);
  const auto us = linspace(0.01, 0.99, 32);
  const auto report = gfd::check_coupling(k, xs, us);
  CHECK_FALSE(report.passed);
  REQUIRE(report.first_two_point_violation);
  const auto& v = *report.first_two_point_violation;
  // confirm the reported triple by direct evaluation
  CHECK(v.x < v.y);
  const double lhs_keep = v.x * k.inverse_cdf(v.x, v.u);
  const double rhs_keep = v.y * k.inverse_cdf(v.y, v.u);
  const double lhs_give = v.x * (1 - k.inverse_cdf(v.x, v.u));
  const double rhs_give = v.y * (1 - k.inverse_cdf(v.y, v.u));
  CHECK((lhs_keep > rhs_keep || lhs_give > rhs_give));

  // the differential criterion l + x l' in [0, 1] is violated for x > M/2
  CHECK(k.cutoff(0.8) + 0.8 * k.cutoff_slope() < 0.0);
  CHECK_FALSE(report.differential_pass);
}

TEST_CASE("coupling on a single-point grid is vacuous") {
  const std::vector<double> xs{0.5};
  const std::vector<double> us{0.3};
  gfd::DivisionKernel::Params p;
  p.l0 = 0.45;
  p.l1 = -0.45;
  const auto report = gfd::check_coupling(gfd::DivisionKernel(p), xs, us);
  CHECK(report.two_point_pass);
  CHECK(report.pairs_checked == 0);
}

TEST_CASE("alpha rule weights") {
  for (const auto* k : {&kUniform, &kRamp}) {
    const auto rule = gfd::alpha_rule(*k, 0.7);
    CHECK(rule.alpha.size() == static_cast<std::size_t>(gfd::kAlphaNodes));
    double sum = 0.0;
    for (double w : rule.weight) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("monotone integral") {
  const auto grid = linspace(0.0, 1.0, 257);
  auto table = [&](auto f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return gfd::MonotoneTable(grid, v);
  };
  const auto one = table([](double) { return 1.0; });
  const auto c = table([](double) { return 0.3; });
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(gfd::monotone_integral(kUniform, one, x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gfd::monotone_integral(kRamp, c, x) == doctest::Approx(0.09).epsilon(1e-14));
  }

  // brute-force oracle: fine Simpson of q f f for a smooth f
  const auto f = table([](double z) { return std::exp(-2 * z); });
  for (double x : {0.2, 0.7}) {
    auto integrand = [&](double a) { return kUniform.density(x, a) * f(a * x) * f((1 - a) * x); };
    const double ref = oracle::simpson(integrand, 0.25, 0.75, 20000);
    CHECK(gfd::monotone_integral(kUniform, f, x) == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("monotone table") {
  const gfd::MonotoneTable t({0.0, 0.5, 1.0}, {1.0, 0.4, 0.0});
  CHECK(t(-1.0) == 1.0);
  CHECK(t(0.25) == doctest::Approx(0.7));
  CHECK(t(2.0) == 0.0);
}
