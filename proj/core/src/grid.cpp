#include "gfd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gfd {

MassGrid::MassGrid(double max_mass, std::size_t n) : max_mass_(max_mass) {
  if (!(max_mass > 0.0)) throw std::invalid_argument("grid max_mass must be positive");
  if (n < 2) throw std::invalid_argument("grid needs at least two cells");
  step_ = max_mass / static_cast<double>(n);
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) nodes_[i] = (static_cast<double>(i) + 0.5) * step_;
}

void MassGrid::stencil(double z, std::size_t& j, double& t) const {
  const std::size_t n = nodes_.size();
  const double s = z / step_ - 0.5;
  if (s <= 0.0) {
    j = 0;
    t = 0.0;
    return;
  }
  if (s >= static_cast<double>(n - 1)) {
    j = n - 2;
    t = 1.0;
    return;
  }
  const double fl = std::floor(s);
  j = std::min(static_cast<std::size_t>(fl), n - 2);
  t = s - static_cast<double>(j);
}

double MassGrid::interpolate(std::span<const double> values, double z) const {
  std::size_t j;
  double t;
  stencil(z, j, t);
  return values[j] + t * (values[j + 1] - values[j]);
}

}  // namespace gfd
