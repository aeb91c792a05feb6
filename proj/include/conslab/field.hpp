#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "conslab/grid.hpp"

namespace conslab {

/// Real gridded field on the slab.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  /// Samples fn(x1, x2, z) at every node.
  static ScalarField sample(GridPtr grid, const std::function<double(double, double, double)>& fn);

  const GridPtr& grid() const { return grid_; }
  const Grid& g() const { return *grid_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& at(int i1, int i2, int k) { return values_[index(i1, i2, k)]; }
  double at(int i1, int i2, int k) const { return values_[index(i1, i2, k)]; }
  std::size_t index(int i1, int i2, int k) const {
    return (static_cast<std::size_t>(i1) * grid_->N2 + i2) * grid_->Nz + k;
  }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double c);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);
/// Pointwise product.
ScalarField operator*(const ScalarField& a, const ScalarField& b);

/// Three Cartesian components; u_h = (u1, u2).
struct VectorField {
  std::array<ScalarField, 3> c;

  VectorField() = default;
  explicit VectorField(GridPtr grid) : c{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}
  VectorField(ScalarField a, ScalarField b, ScalarField d) : c{std::move(a), std::move(b), std::move(d)} {}

  ScalarField& operator[](int i) { return c[i]; }
  const ScalarField& operator[](int i) const { return c[i]; }
  const GridPtr& grid() const { return c[0].grid(); }
  bool all_finite() const { return c[0].all_finite() && c[1].all_finite() && c[2].all_finite(); }

  /// Largest |u3| on the z = 0 row (zero for tangent fields).
  double wall_normal_trace_max() const;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Boundary trace f(., 0) as an N1*N2 array.
std::vector<double> wall_trace(const ScalarField& f);

}  // namespace conslab
