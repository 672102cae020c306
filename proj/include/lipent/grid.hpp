#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lipent {

/// Scalar function on [0,1]^d given by its values at the (res+1)^d nodes
/// i/res, extended to the whole cube by multilinear interpolation.
/// Node (i_1,...,i_d) is stored at i_1 + (res+1)*i_2 + (res+1)^2*i_3.
class UnitGridFunction {
 public:
  UnitGridFunction(int dim, int resolution, std::vector<double> values);

  /// Samples `f` at every node.
  static UnitGridFunction sample(int dim, int resolution, const std::function<double(std::span<const double>)>& f);

  int dim() const noexcept { return dim_; }
  int resolution() const noexcept { return resolution_; }
  std::size_t node_count() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Coordinates of node `index`.
  std::vector<double> node(std::size_t index) const;

  /// Multilinear interpolation; points outside [0,1]^d are clamped.
  double operator()(std::span<const double> x) const;

  /// Integral of |f|^p over [0,1]^d for the interpolant, by 3-point
  /// Gauss-Legendre per axis in every grid cell. Exact for p in {1, 2}
  /// whenever f keeps one sign inside each cell.
  double integrate_abs_pow(double p) const;

  double sup_abs() const;

 private:
  int dim_;
  int resolution_;
  std::vector<double> values_;
};

}  // namespace lipent
