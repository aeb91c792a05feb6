#include "conslab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "conslab/error.hpp"

namespace conslab {

void apply_z_stencil(const std::vector<Stencil>& st, int Nz, std::span<const double> in,
                     std::span<double> out, std::size_t columns) {
  for (std::size_t c = 0; c < columns; ++c) {
    const double* f = in.data() + c * Nz;
    double* o = out.data() + c * Nz;
    for (int k = 0; k < Nz; ++k) {
      const Stencil& s = st[k];
      double acc = 0.0;
      for (int m = 0; m < s.width; ++m) acc += s.coef[m] * f[s.start + m];
      o[k] = acc;
    }
  }
}

ScalarField ddy(const ScalarField& f, int axis) {
  if (axis != 1 && axis != 2) throw InvalidArgument("ddy: axis must be 1 or 2");
  const Grid& g = f.g();
  SpectralField s = to_spectral(f);
  for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
    const cplx factor = g.is_nyquist(j1, j2) ? cplx(0.0) : cplx(0.0, axis == 1 ? xi1 : xi2);
    for (auto& v : s.column(j1, j2)) v *= factor;
  });
  return to_physical(s);
}

ScalarField lap_h(const ScalarField& f) {
  const Grid& g = f.g();
  SpectralField s = to_spectral(f);
  for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
    const double factor = g.is_nyquist(j1, j2) ? 0.0 : -(xi1 * xi1 + xi2 * xi2);
    for (auto& v : s.column(j1, j2)) v *= factor;
  });
  return to_physical(s);
}

ScalarField ddz(const ScalarField& f) {
  const Grid& g = f.g();
  ScalarField r(f.grid());
  apply_z_stencil(g.d1, g.Nz, f.values(), r.values(), g.columns());
  return r;
}

ScalarField d2z(const ScalarField& f) {
  const Grid& g = f.g();
  if (g.Nz < 4) throw InvalidArgument("d2z: Nz must be >= 4");
  ScalarField r(f.grid());
  apply_z_stencil(g.d2, g.Nz, f.values(), r.values(), g.columns());
  return r;
}

ScalarField laplacian(const ScalarField& f) { return lap_h(f) + d2z(f); }

ScalarField divergence(const VectorField& u) { return ddy(u[0], 1) + ddy(u[1], 2) + ddz(u[2]); }

VectorField curl(const VectorField& u) {
  return VectorField(ddy(u[2], 2) - ddz(u[1]), ddz(u[0]) - ddy(u[2], 1), ddy(u[1], 1) - ddy(u[0], 2));
}

VectorField gradient(const ScalarField& f) { return VectorField(ddy(f, 1), ddy(f, 2), ddz(f)); }

TensorField velocity_gradient(const VectorField& u) {
  TensorField t;
  for (int i = 0; i < 3; ++i) {
    t[i][0] = ddy(u[i], 1);
    t[i][1] = ddy(u[i], 2);
    t[i][2] = ddz(u[i]);
  }
  return t;
}

double inner(const ScalarField& f, const ScalarField& g) {
  const Grid& gr = f.g();
  const auto& a = f.values();
  const auto& b = g.values();
  double acc = 0.0;
  for (std::size_t c = 0; c < gr.columns(); ++c) {
    double col = 0.0;
    for (int k = 0; k < gr.Nz; ++k) col += gr.zweights[k] * a[c * gr.Nz + k] * b[c * gr.Nz + k];
    acc += col;
  }
  return acc * gr.area() / static_cast<double>(gr.columns());
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double l2_norm(const VectorField& u) {
  return std::sqrt(inner(u[0], u[0]) + inner(u[1], u[1]) + inner(u[2], u[2]));
}

double linf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double linf_norm(const VectorField& u) {
  return std::max({linf_norm(u[0]), linf_norm(u[1]), linf_norm(u[2])});
}

}  // namespace conslab
