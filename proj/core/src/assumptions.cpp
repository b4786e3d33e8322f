#include "gfd/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gfd/format.hpp"

namespace gfd {

namespace {

std::vector<double> interior_grid(double length, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = length * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return out;
}

// Simpson over [a, b] using one-sided limits at both ends, so a jump at an
// endpoint does not leak into the sum.
double simpson(const DivisionKernel& kernel, double x, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double sum = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    double alpha = a + h * k;
    if (k == 0) alpha = std::nextafter(a, b);
    if (k == intervals) alpha = std::nextafter(b, a);
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * kernel.density(x, alpha);
  }
  return sum * h / 3.0;
}

std::string at(double S, double x) { return "S=" + format_double(S) + " x=" + format_double(x); }

}  // namespace

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed || !c.gating; });
}

std::string AssumptionReport::render() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.label;
    if (!c.gating) out << " [informational]";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
  }
  return out.str();
}

AssumptionReport validate_assumptions(const ModelDefinition& model, const EnvironmentRange& env,
                                      std::size_t x_probe, std::size_t alpha_probe, double slack,
                                      double equality_tol) {
  if (x_probe < 16 || alpha_probe < 16) throw std::invalid_argument("probe grids need at least 16 points");
  const double M = model.max_mass;
  const auto& kernel = model.kernel;
  std::vector<double> s_values = env.resource.empty() ? std::vector<double>{1.0} : env.resource;
  const auto xs = interior_grid(M, x_probe);
  const auto alphas = interior_grid(1.0, alpha_probe);

  AssumptionReport r;
  auto add = [&r](std::string label, bool passed, std::string detail, bool gating = true) {
    r.checks.push_back({std::move(label), passed, gating, std::move(detail)});
    return passed;
  };

  // Kernel.
  if (!kernel.has_density()) {
    r.empirical_q_bar = std::numeric_limits<double>::infinity();
    add("kernel symmetric q(x,a) = q(x,1-a)", true, "point mass at 1/2");
    add("kernel integrates to 1", true, "point mass at 1/2");
    add("kernel density bounded", true, "no density (equal mitosis); empirical q-bar = inf", false);
  } else {
    double worst_sym = 0.0, worst_norm = 0.0, q_bar = 0.0;
    std::string sym_where, norm_where;
    for (double x : xs) {
      for (double a : alphas) {
        const double q = kernel.density(x, a);
        q_bar = std::max(q_bar, q);
        const double d = std::abs(q - kernel.density(x, 1.0 - a));
        if (d > worst_sym) {
          worst_sym = d;
          sym_where = "x=" + format_double(x) + " a=" + format_double(a);
        }
      }
      const double lo = kernel.support_lo(x), hi = kernel.support_hi(x);
      const double mid = std::clamp(0.5, lo, hi);
      const double total = simpson(kernel, x, lo, mid, 8192) + simpson(kernel, x, mid, hi, 8192);
      if (std::abs(total - 1.0) > worst_norm) {
        worst_norm = std::abs(total - 1.0);
        norm_where = "x=" + format_double(x);
      }
    }
    r.empirical_q_bar = q_bar;
    const bool sym = add("kernel symmetric q(x,a) = q(x,1-a)", worst_sym <= equality_tol,
                         "max defect " + format_double(worst_sym) + (sym_where.empty() ? "" : " at " + sym_where));
    const bool norm = add("kernel integrates to 1", worst_norm <= equality_tol,
                          "max defect " + format_double(worst_norm) + (norm_where.empty() ? "" : " at " + norm_where));
    const bool dom = add("kernel density bounded", std::isfinite(q_bar), "empirical q-bar = " + format_double(q_bar));
    r.kernel_ok = sym && norm && dom;
  }

  // Growth speed.
  {
    bool ends = true, inside = true;
    std::string where;
    for (double S : s_values) {
      if (std::abs(model.g(S, 0.0)) > slack || std::abs(model.g(S, M)) > slack) {
        ends = false;
        if (where.empty()) where = "S=" + format_double(S) + " nonzero at an endpoint";
      }
      for (double x : xs) {
        if (!(model.g(S, x) > 0.0)) {
          inside = false;
          if (where.empty()) where = at(S, x) + " not positive";
        }
      }
    }
    r.growth_ok = add("growth speed vanishes at 0 and M, positive inside", ends && inside, where);

    double worst = 0.0;
    std::string smooth_where;
    const double delta = 1e-4 * M;
    for (double S : s_values) {
      double scale = 0.0;
      std::vector<double> gap;
      for (double x : xs) {
        const double d1 = (model.g(S, x + delta) - model.g(S, x - delta)) / (2 * delta);
        const double d2 = (model.g(S, x + delta / 2) - model.g(S, x - delta / 2)) / delta;
        scale = std::max(scale, std::abs(d1));
        gap.push_back(std::abs(d1 - d2));
      }
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double rel = gap[i] / (1.0 + scale);
        if (rel > worst) {
          worst = rel;
          smooth_where = at(S, xs[i]);
        }
      }
    }
    add("growth speed continuously differentiable (finite-difference probe)", worst <= 1e-4,
        "max derivative mismatch " + format_double(worst) + (smooth_where.empty() ? "" : " at " + smooth_where), false);
  }

  // Division rate bounds.
  {
    const double b_bar = model.division_bound;
    const double m_div = model.division.m_div();
    bool ok = true;
    std::string where;
    auto fail = [&](std::string msg) {
      if (ok) where = std::move(msg);
      ok = false;
    };
    for (double S : s_values) {
      for (double x : xs) {
        const double b = model.b(S, x);
        if (b < 0.0 || b > b_bar) fail(at(S, x) + " b=" + format_double(b) + " outside [0, b_bar]");
        if (x <= m_div && b != 0.0) fail(at(S, x) + " b nonzero below m_div");
        if (x > m_div && !(b > 0.0)) fail(at(S, x) + " b not positive above m_div");
      }
      if (model.b(S, m_div) != 0.0) fail("S=" + format_double(S) + " b nonzero at m_div");
    }
    r.division_bounds_ok =
        add("division rate within (0, b_bar] above m_div and zero below", ok,
            where.empty() ? "b_bar = " + format_double(b_bar) : where);
  }

  // Orderings in x and S.
  {
    double worst_x = 0.0, worst_bs = 0.0, worst_gs = 0.0, worst_ratio = 0.0;
    std::string wx, wbs, wgs, wr;
    auto track = [](double defect, double& worst, std::string& where, std::string msg) {
      if (defect > worst) {
        worst = defect;
        where = std::move(msg);
      }
    };
    for (double S : s_values)
      for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        track(model.b(S, xs[i]) - model.b(S, xs[i + 1]), worst_x, wx, at(S, xs[i]));
    for (std::size_t k = 0; k + 1 < s_values.size(); ++k) {
      const double s1 = s_values[k], s2 = s_values[k + 1];
      for (double x : xs) {
        const double b1 = model.b(s1, x), b2 = model.b(s2, x);
        const double g1 = model.g(s1, x), g2 = model.g(s2, x);
        track(b1 - b2, worst_bs, wbs, at(s1, x));
        track(g1 - g2, worst_gs, wgs, at(s1, x));
        if (g1 > 0.0 && g2 > 0.0) track(b2 / g2 - b1 / g1, worst_ratio, wr, at(s1, x));
      }
    }
    auto detail = [](double worst, const std::string& where) {
      return worst > 0.0 ? "worst violation " + format_double(worst) + " at " + where : std::string{};
    };
    r.division_monotone_x = add("division rate non-decreasing in x", worst_x <= slack, detail(worst_x, wx));
    r.division_monotone_s = add("division rate non-decreasing in S", worst_bs <= slack, detail(worst_bs, wbs));
    r.growth_monotone_s = add("growth speed non-decreasing in S", worst_gs <= slack, detail(worst_gs, wgs));
    r.ratio_monotone_s =
        add("division-to-growth ratio b/g non-increasing in S", worst_ratio <= slack, detail(worst_ratio, wr));
  }

  // Offspring ordering.
  {
    std::vector<double> us = alphas;
    r.coupling = check_coupling(kernel, xs, us);
    auto describe = [](const std::optional<CouplingViolation>& v) {
      if (!v) return std::string{};
      return "first violation x=" + format_double(v->x) + " y=" + format_double(v->y) + " u=" + format_double(v->u) +
             " by " + format_double(v->amount) + " (" + v->which + ")";
    };
    add("larger mothers give larger daughters (two-point quantile ordering)", r.coupling.two_point_pass,
        describe(r.coupling.first_two_point_violation));
    add("quantile derivative criterion 0 <= d/dx[x Finv(x,u)] <= 1", r.coupling.differential_pass,
        describe(r.coupling.first_differential_violation));
    add("normalized quantile ordering (1-x/M) Finv(x,u) non-decreasing", r.coupling.literal_pass,
        describe(r.coupling.first_literal_violation), false);
    r.coupling_ok = r.coupling.passed;
  }
  return r;
}

}  // namespace gfd
