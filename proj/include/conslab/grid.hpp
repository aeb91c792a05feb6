#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace conslab {

class Transform;

/// Finite-difference stencil for one grid row:
/// value = sum_{k < width} coef[k] * f[start + k].
struct Stencil {
  int start = 0;
  int width = 0;
  std::array<double, 4> coef{};

  template <class T, class Access>
  T apply(Access&& f) const {
    T acc{};
    for (int k = 0; k < width; ++k) acc += coef[k] * f(start + k);
    return acc;
  }
};

/// Horizontally periodic, wall-normal stretched slab [0,L1)x[0,L2)x[0,Zmax].
///
/// Node (i1, i2, k) sits at (i1*L1/N1, i2*L2/N2, z[k]). Field storage is
/// row-major with z fastest: index = (i1*N2 + i2)*Nz + k.
class Grid {
 public:
  double L1 = 0, L2 = 0;
  int N1 = 0, N2 = 0, Nz = 0;
  double Zmax = 0, stretch = 0;
  std::vector<double> z;

  /// Trapezoidal quadrature weights in z (sum to Zmax).
  std::vector<double> zweights;
  /// First derivative: centered 3-point nonuniform in the interior,
  /// one-sided second-order at both ends.
  std::vector<Stencil> d1;
  /// Second derivative: 3-point nonuniform in the interior, 4-point
  /// one-sided (second order) at both ends.
  std::vector<Stencil> d2;

  std::size_t size() const { return static_cast<std::size_t>(N1) * N2 * Nz; }
  std::size_t columns() const { return static_cast<std::size_t>(N1) * N2; }
  int nky() const { return N2 / 2 + 1; }
  std::size_t spectral_columns() const { return static_cast<std::size_t>(N1) * nky(); }
  std::size_t spectral_size() const { return spectral_columns() * Nz; }

  double x1(int i1) const { return L1 * i1 / N1; }
  double x2(int i2) const { return L2 * i2 / N2; }
  double area() const { return L1 * L2; }
  double volume() const { return L1 * L2 * Zmax; }
  double min_dz() const;
  double min_dx() const;

  /// Signed integer wavenumber for the first transformed axis.
  int k1_of(int j1) const { return j1 <= N1 / 2 ? j1 : j1 - N1; }
  int k2_of(int j2) const { return j2; }
  /// Physical wavenumbers 2*pi*k/L.
  double xi1(int j1) const;
  double xi2(int j2) const;
  bool is_nyquist(int j1, int j2) const {
    return (2 * j1 == N1) || (2 * j2 == N2);
  }
  /// 2/3-rule retained band: |k| <= (N-1)/3 on both axes, Nyquist excluded.
  bool kept(int j1, int j2) const;

  const Transform& fft() const { return *transform_; }

 private:
  friend std::shared_ptr<const Grid> make_grid(double, double, int, int, int, double, double);
  std::shared_ptr<Transform> transform_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a slab grid with nodes z(s) = Zmax (e^{stretch s} - 1)/(e^{stretch} - 1),
/// s uniform in [0,1]; stretch = 0 gives uniform spacing.
GridPtr make_grid(double L1, double L2, int N1, int N2, int Nz, double Zmax, double stretch);

/// Nonuniform three-point stencils on arbitrary strictly increasing nodes.
std::vector<Stencil> first_derivative_stencils(const std::vector<double>& z);
std::vector<Stencil> second_derivative_stencils(const std::vector<double>& z);

/// Fornberg weights for the derivative of order `order` at x0 using `nodes`.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);
std::vector<double> trapezoid_weights(const std::vector<double>& z);
std::vector<double> stretched_nodes(int Nz, double Zmax, double stretch);

}  // namespace conslab
