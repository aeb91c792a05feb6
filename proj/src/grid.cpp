#include "conslab/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "conslab/error.hpp"
#include "conslab/spectral.hpp"

namespace conslab {

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order) {
  // Fornberg (1988), Math. Comp. 51:699.
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

namespace {

Stencil make_stencil(const std::vector<double>& z, int row, int start, int width, int order) {
  Stencil s;
  s.start = start;
  s.width = width;
  std::vector<double> nodes(z.begin() + start, z.begin() + start + width);
  const auto w = fd_weights(z[row], nodes, order);
  for (int k = 0; k < width; ++k) s.coef[k] = w[k];
  return s;
}

}  // namespace

std::vector<Stencil> first_derivative_stencils(const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  std::vector<Stencil> st(n);
  st[0] = make_stencil(z, 0, 0, 3, 1);
  for (int k = 1; k < n - 1; ++k) st[k] = make_stencil(z, k, k - 1, 3, 1);
  st[n - 1] = make_stencil(z, n - 1, n - 3, 3, 1);
  return st;
}

std::vector<Stencil> second_derivative_stencils(const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  std::vector<Stencil> st(n);
  st[0] = make_stencil(z, 0, 0, 4, 2);
  for (int k = 1; k < n - 1; ++k) st[k] = make_stencil(z, k, k - 1, 3, 2);
  st[n - 1] = make_stencil(z, n - 1, n - 4, 4, 2);
  return st;
}

std::vector<double> trapezoid_weights(const std::vector<double>& z) {
  const std::size_t n = z.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = z[k + 1] - z[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

std::vector<double> stretched_nodes(int Nz, double Zmax, double stretch) {
  std::vector<double> z(Nz);
  for (int k = 0; k < Nz; ++k) {
    const double s = static_cast<double>(k) / (Nz - 1);
    z[k] = stretch == 0.0 ? Zmax * s : Zmax * std::expm1(stretch * s) / std::expm1(stretch);
  }
  z.front() = 0.0;
  z.back() = Zmax;
  return z;
}

double Grid::min_dz() const {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < Nz; ++k) m = std::min(m, z[k + 1] - z[k]);
  return m;
}

double Grid::min_dx() const { return std::min(L1 / N1, L2 / N2); }

double Grid::xi1(int j1) const { return 2.0 * std::numbers::pi * k1_of(j1) / L1; }
double Grid::xi2(int j2) const { return 2.0 * std::numbers::pi * k2_of(j2) / L2; }

bool Grid::kept(int j1, int j2) const {
  if (is_nyquist(j1, j2)) return false;
  const int k1 = std::abs(k1_of(j1));
  const int k2 = std::abs(k2_of(j2));
  return k1 <= (N1 - 1) / 3 && k2 <= (N2 - 1) / 3;
}

GridPtr make_grid(double L1, double L2, int N1, int N2, int Nz, double Zmax, double stretch) {
  if (!(L1 > 0) || !(L2 > 0) || !(Zmax > 0))
    throw InvalidArgument("make_grid: lengths must be positive");
  if (N1 < 8 || N2 < 8 || N1 % 2 || N2 % 2)
    throw InvalidArgument("make_grid: N1, N2 must be even and >= 8 (got " + std::to_string(N1) +
                          ", " + std::to_string(N2) + ")");
  if (Nz < 3) throw InvalidArgument("make_grid: Nz must be >= 3");
  if (!std::isfinite(stretch) || stretch < 0 || stretch > 50)
    throw InvalidArgument("make_grid: stretch must lie in [0, 50]");

  auto g = std::make_shared<Grid>();
  g->L1 = L1;
  g->L2 = L2;
  g->N1 = N1;
  g->N2 = N2;
  g->Nz = Nz;
  g->Zmax = Zmax;
  g->stretch = stretch;
  g->z = stretched_nodes(Nz, Zmax, stretch);
  for (int k = 0; k + 1 < Nz; ++k)
    if (!(g->z[k + 1] > g->z[k])) throw InvalidArgument("make_grid: degenerate z nodes");
  g->zweights = trapezoid_weights(g->z);
  g->d1 = first_derivative_stencils(g->z);
  g->d2 = Nz >= 4 ? second_derivative_stencils(g->z) : std::vector<Stencil>(Nz);
  g->transform_ = std::make_shared<Transform>(N1, N2, Nz);
  return g;
}

}  // namespace conslab
