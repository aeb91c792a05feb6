#pragma once

#include <vector>

#include "conslab/field.hpp"
#include "conslab/spectral.hpp"

namespace conslab {

enum class Gauge { none, mean_zero };

/// Delta p = rhs in the slab, d_z p(., 0) = flux0, decay toward Zmax.
/// flux0 holds one half-spectrum coefficient per horizontal mode (j1*nky + j2).
struct NeumannProblem {
  ScalarField rhs;
  std::vector<cplx> flux0;
  Gauge gauge = Gauge::mean_zero;
};

struct PressureSplit {
  ScalarField p1;
  ScalarField p2;
  Gauge gauge = Gauge::mean_zero;
  /// Set when |F| at the top of the slab exceeded the decay threshold.
  bool nondecaying = false;
};

/// Kernel representation of the wall-bounded Neumann problem with data F:
///   G(z,z') F = -e^{-k z>} cosh(k z<) (i xi . F_h)/k + {-cosh(kz) e^{-kz'}, z < z'; sinh(kz') e^{-kz}, z > z'} F3
/// with k = |xi|. Trapezoid quadrature is done interval by interval so the
/// unit jump of the F3 entry at z = z' is integrated from one side only.
struct KernelOptions {
  /// Relative tolerance for |F(Zmax)| / max|F| in the decay check.
  double decay_tol = 1e-6;
  /// Throw NumericalError instead of only flagging nondecaying input.
  bool strict = false;
  /// O(Nz) cumulative evaluation of the separable kernel (otherwise O(Nz^2)).
  bool fast = true;
};

/// p1 from Delta p1 = div F, d_z p1(., 0) = F3(., 0), mean-zero over the slab.
ScalarField solve_p1_kernel(const VectorField& F, const KernelOptions& opt = {}, bool* nondecaying = nullptr);
/// Spectral form on already transformed components (used by the time stepper).
void solve_p1_kernel_spectral(const Grid& g, const SpectralField& F1, const SpectralField& F2,
                              const SpectralField& F3, SpectralField& p, bool fast = true);

/// Per-mode kernel quadrature of one column (k > 0): returns p(z_i) for the
/// horizontal source a = i xi . F_h and the normal source F3.
void kernel_column(const std::vector<double>& z, const std::vector<double>& w, double k,
                   std::span<const cplx> a, std::span<const cplx> F3, std::span<cplx> out, bool fast);

/// Closed form p2^(xi, z) = 2 i alpha eps (xi/|xi|) . u_h^(xi, 0) e^{-|xi| z}; zero mode is 0.
/// trace1, trace2 are the half-spectrum wall traces of u1, u2.
ScalarField solve_p2_closed(const GridPtr& grid, const std::vector<cplx>& trace1,
                            const std::vector<cplx>& trace2, double alpha, double eps);
void solve_p2_closed_spectral(const Grid& g, const std::vector<cplx>& trace1, const std::vector<cplx>& trace2,
                              double alpha, double eps, SpectralField& p);

/// Second-order finite-difference oracle. Rows: one-sided Neumann row at z = 0,
/// three-point Laplacian inside, radiation row p' + |xi| p = 0 at Zmax (exact for
/// decaying harmonic tails). The zero mode uses p(Zmax) = 0 and is then shifted
/// to zero mean; Gauge::none is rejected because that mode is singular.
ScalarField solve_neumann_fd(const NeumannProblem& prob);

/// One-mode FD solve (p'' - k^2 p = rhs) on arbitrary nodes with the same rows.
std::vector<cplx> solve_mode_fd(const std::vector<double>& z, double k, std::span<const cplx> rhs, cplx flux0);

/// F = -(u . grad) u with 2/3-rule truncation of the products.
VectorField advection(const VectorField& u, bool dealias = true);

/// p1 from F = -u.grad u, p2 from the wall trace of u_h; p1 + p2 solves
/// Delta p = div F, d_z p(0) = -2 alpha eps div_h u_h(0) + F3(0).
PressureSplit pressure_split(const VectorField& u, double alpha, double eps, bool dealias = true);

/// sup over the sampled z of ||K_xi(z,.)||_L1 + |xi| ||G_xi(z,.)||_L1, K = d_z G,
/// evaluated by fine quadrature on [0, zcut].
double kernel_l1_bound(double k, const std::vector<double>& zsamples, double zcut = 60.0, int n = 20000);

/// Half-spectrum wall trace of f, one coefficient per horizontal mode.
std::vector<cplx> spectral_trace(const ScalarField& f);

}  // namespace conslab
