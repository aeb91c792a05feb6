#pragma once

#include <array>

#include "conslab/field.hpp"
#include "conslab/spectral.hpp"

namespace conslab {

/// Spectral horizontal derivative along axis 1 or 2 (Nyquist modes map to 0).
ScalarField ddy(const ScalarField& f, int axis);
/// Second-order nonuniform wall-normal derivative.
ScalarField ddz(const ScalarField& f);
ScalarField d2z(const ScalarField& f);
/// Horizontal Laplacian, spectral.
ScalarField lap_h(const ScalarField& f);
/// lap_h(f) + d2z(f).
ScalarField laplacian(const ScalarField& f);

ScalarField divergence(const VectorField& u);
VectorField curl(const VectorField& u);
VectorField gradient(const ScalarField& f);

/// Velocity gradient grad[i][j] = d_j u_i.
using TensorField = std::array<std::array<ScalarField, 3>, 3>;
TensorField velocity_gradient(const VectorField& u);

/// Quadrature inner product: trapezoid in z, exact mean in (x1, x2), times area.
double inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& u);
double linf_norm(const ScalarField& f);
/// Componentwise maximum.
double linf_norm(const VectorField& u);

/// Applies a z-stencil family to every column: out[k] = sum stencil[k] f.
void apply_z_stencil(const std::vector<Stencil>& st, int Nz, std::span<const double> in,
                     std::span<double> out, std::size_t columns);

}  // namespace conslab
