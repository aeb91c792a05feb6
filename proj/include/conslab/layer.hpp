#pragma once

#include <array>
#include <vector>

#include "conslab/dynamics.hpp"
#include "conslab/field.hpp"

namespace conslab {

/// eta = omega_h - 2 alpha u_h^perp with (a, b)^perp = (-b, a).
std::array<ScalarField, 2> eta_field(const VectorField& u, double alpha);
/// max |eta(., 0)| over both components.
double eta_boundary_max(const VectorField& u, double alpha);

struct EtaResidual {
  double t = 0.0;
  double residual = 0.0;
};

/// Interior max-norm residual of
///   d_t eta + u.grad eta - eps Lap eta - omega.grad u_h - 2 alpha grad_h^perp p
/// at every state with both neighbours (centered time differences). Rows with
/// z >= z_limit (the sponge), z < z_min and the two boundary rows are
/// excluded. A fixed z_min > 0 keeps the rows whose stencils differentiate the
/// one-cell wall closure three times out of a refinement study.
std::vector<EtaResidual> eta_residual(const Trajectory& traj, double alpha, double eps,
                                      double z_limit = 1e300, bool dealias = true, double z_min = 0.0);

struct LayerProfile {
  double t = 0.0;
  double eps = 0.0;
  std::vector<double> zeta_nodes;
  /// (u_eps - u_euler)/sqrt(eps) on a uniform grid in zeta = z/sqrt(eps).
  VectorField V;
  /// Fewer than 4 nodes inside z <= sqrt(eps).
  bool unresolved = false;
};

LayerProfile layer_profile(const VectorField& u_eps, const VectorField& u_euler, double eps, double t = 0.0,
                           int n_zeta = 65, double zeta_max = 10.0);

/// Number of grid nodes with 0 < z <= sqrt(eps).
int layer_nodes(const Grid& g, double eps);

struct ScalingFit {
  std::vector<double> eps_list;
  std::vector<double> amplitudes;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log(amplitude) against log(eps).
ScalingFit amplitude_scaling(const std::vector<double>& eps_list, const std::vector<double>& amplitudes);

struct ConvergenceMetrics {
  double l2 = 0.0;
  double linf = 0.0;
};
ConvergenceMetrics convergence_metrics(const VectorField& u_eps, const VectorField& u_euler);

/// max over the grid of |(u_eps - u_euler)_h|, componentwise.
double tangential_difference_max(const VectorField& u_eps, const VectorField& u_euler);

/// max |d_z u_h| and max |d_zz u_h| over the grid.
double dz_tangential_max(const VectorField& u);
double dzz_tangential_max(const VectorField& u);

}  // namespace conslab
