#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gfd {

/// Cell-centred grid x_i = (i + 1/2) h, i = 0..n-1, h = M / n. The endpoints
/// 0 and M are never nodes.
class MassGrid {
 public:
  MassGrid() = default;
  MassGrid(double max_mass, std::size_t n);

  std::size_t size() const { return nodes_.size(); }
  double max_mass() const { return max_mass_; }
  double step() const { return step_; }
  double node(std::size_t i) const { return nodes_[i]; }
  /// Right face of cell i, (i + 1) h.
  double face(std::size_t i) const { return step_ * static_cast<double>(i + 1); }
  std::span<const double> nodes() const { return nodes_; }

  /// Piecewise-linear interpolation of node values, constant beyond the
  /// first and last nodes.
  double interpolate(std::span<const double> values, double z) const;

  /// Index j and weight t with interpolate(z) = (1 - t) v[j] + t v[j + 1].
  void stencil(double z, std::size_t& j, double& t) const;

  bool operator==(const MassGrid& other) const {
    return max_mass_ == other.max_mass_ && nodes_.size() == other.nodes_.size();
  }

 private:
  double max_mass_ = 1.0;
  double step_ = 1.0;
  std::vector<double> nodes_;
};

}  // namespace gfd
