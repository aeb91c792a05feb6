#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "conslab/field.hpp"
#include "conslab/grid.hpp"

namespace testutil {

inline constexpr double kPi = std::numbers::pi;

inline conslab::GridPtr slab(int nz = 48, double zmax = 10.0, double stretch = 3.0, int n = 16) {
  return conslab::make_grid(2 * kPi, 2 * kPi, n, n, nz, zmax, stretch);
}

inline double max_abs_diff(const conslab::ScalarField& a, const conslab::ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

// A few kept Fourier modes times decaying z profiles; smooth up to the wall.
inline conslab::ScalarField band_limited(const conslab::GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  struct M {
    int m1, m2;
    double a, ph, b;
  };
  std::vector<M> ms;
  for (int i = 0; i < 5; ++i)
    ms.push_back({static_cast<int>(rng() % 9) - 4, static_cast<int>(rng() % 5), U(rng), kPi * U(rng), 1.0 + 0.5 * U(rng)});
  return conslab::ScalarField::sample(g, [&](double x1, double x2, double z) {
    double s = 0.0;
    for (const auto& m : ms) s += m.a * std::cos(m.m1 * x1 + m.m2 * x2 + m.ph) * std::exp(-m.b * z) * (1 + z);
    return s;
  });
}

// Trapezoid rule for a z-profile on a fine uniform grid.
template <class F>
double fine_z_integral(F&& f, double zmax, int n = 20000) {
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += (i == 0 || i == n ? 0.5 : 1.0) * f(zmax * i / n);
  return s * zmax / n;
}

}  // namespace testutil
