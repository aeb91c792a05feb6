#include "conslab/field.hpp"

#include <algorithm>
#include <cmath>

#include "conslab/error.hpp"

namespace conslab {

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), values_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw InvalidArgument("ScalarField: size mismatch");
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(double, double, double)>& fn) {
  ScalarField f(grid);
  const Grid& g = *grid;
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2)
      for (int k = 0; k < g.Nz; ++k) f.at(i1, i2, k) = fn(g.x1(i1), g.x2(i2), g.z[k]);
  return f;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (auto& v : values_) v *= c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  ScalarField r = a;
  for (std::size_t i = 0; i < r.values().size(); ++i) r.values()[i] *= b.values()[i];
  return r;
}

double VectorField::wall_normal_trace_max() const {
  double m = 0.0;
  for (double v : wall_trace(c[2])) m = std::max(m, std::abs(v));
  return m;
}

VectorField operator+(VectorField a, const VectorField& b) {
  for (int i = 0; i < 3; ++i) a[i] += b[i];
  return a;
}

VectorField operator-(VectorField a, const VectorField& b) {
  for (int i = 0; i < 3; ++i) a[i] -= b[i];
  return a;
}

VectorField operator*(double s, VectorField a) {
  for (int i = 0; i < 3; ++i) a[i] *= s;
  return a;
}

std::vector<double> wall_trace(const ScalarField& f) {
  const Grid& g = f.g();
  std::vector<double> t(g.columns());
  for (std::size_t c = 0; c < g.columns(); ++c) t[c] = f.values()[c * g.Nz];
  return t;
}

}  // namespace conslab
