#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "conslab/conormal.hpp"
#include "conslab/field.hpp"
#include "conslab/operators.hpp"
#include "conslab/spectral.hpp"

namespace conslab {

struct SimConfig {
  double eps = 1e-2;
  double alpha = 0.5;
  double dt = 1e-2;
  double T = 1.0;
  GridPtr grid;
  bool dealias = true;
  double sponge_start = 8.0;
  double sponge_rate = 0.0;
  int diag_every = 10;
  int m = 3;
  double div_tol = 1e-8;
  double bc_tol = 1e-6;
  double cfl_max = 0.8;

  /// Throws InvalidArgument on violated invariants.
  void validate() const;
};

struct State {
  double t = 0.0;
  VectorField u;
  /// Pressure split of u (F = -u.grad u); empty until computed.
  ScalarField p1, p2;
  bool has_pressure() const { return static_cast<bool>(p1.grid()); }
};

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;      ///< 1/2 |u|^2
  double dissipation = 0.0;  ///< 2 eps |Su|^2
  double boundary = 0.0;     ///< 2 alpha eps |u_h(.,0)|^2_{L2(wall)}
};

struct StepDiagnostics {
  double divergence = 0.0;     ///< max |div u| after the step
  double wall_normal = 0.0;    ///< max |u3(.,0)|
  double robin = 0.0;          ///< max |d_z u_h(0) - 2 alpha u_h(0)| (viscous only)
  double correction = 0.0;     ///< size of the discrete projection correction
  double cfl = 0.0;
};

struct Trajectory {
  std::vector<State> states;            ///< at diagnostic times
  std::vector<ConormalReport> reports;  ///< one per state
  std::vector<EnergyRecord> energy;     ///< every step, including t = 0
  std::vector<StepDiagnostics> diagnostics;  ///< one per state
  bool failed = false;
  std::string failure;
};

enum class InitKind { shear, perturbed_shear, vortex_pair };
InitKind parse_init_kind(const std::string& s);
std::string to_string(InitKind k);

/// Divergence-free, tangent initial data with an exponential envelope in z.
VectorField make_initial_data(InitKind kind, double amplitude, const GridPtr& grid, unsigned long long seed = 1);

/// |Su|^2 with the quadrature the stepper dissipates exactly: normal
/// derivatives squared on cell edges, cross terms with the skew derivative.
double strain_norm_sq(const VectorField& u);
/// |Su|^2 by nodal quadrature of all nine entries of (grad u + grad u^T)/2.
double strain_norm_sq(const TensorField& grad);

/// Sets u3(.,0) = 0 and solves the one-sided row d_z u_h(0) = 2 alpha u_h(0)
/// for the wall value of u_h.
VectorField navier_bc_apply(const VectorField& u, double alpha);

/// Residual of the discrete Navier condition on the wall row.
double robin_residual(const VectorField& u, double alpha);

EnergyRecord energy_record(const VectorField& u, double t, double eps, double alpha);

/// IMEX stepper with factorizations cached for one configuration.
class Integrator {
 public:
  explicit Integrator(SimConfig cfg);
  ~Integrator();
  Integrator(Integrator&&) noexcept;
  Integrator& operator=(Integrator&&) noexcept;

  const SimConfig& config() const { return cfg_; }

  /// Projects a field onto the discrete admissible set of this configuration
  /// (kept band, u3(0) = 0, discrete divergence 0, Navier row when eps > 0).
  VectorField project(const VectorField& u, double* correction = nullptr) const;

  /// Advances one step. The SBDF2 history is carried inside the integrator; call
  /// reset() before reusing it on an unrelated state.
  State step(const State& s, StepDiagnostics* diag = nullptr);
  void reset();

  /// Fills s.p1, s.p2 for s.u.
  void attach_pressure(State& s) const;

 private:
  struct Impl;
  SimConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

/// One step from a fresh integrator (the two-stage IMEX start, having no history).
State step(const State& s, const SimConfig& cfg);
/// Same with eps = 0: no diffusion, no p2, only u3(0) = 0 enforced.
State euler_step(const State& s, const SimConfig& cfg);

/// Projects u0, then steps to cfg.T. Reports every diag_every steps and at T.
Trajectory run(const SimConfig& cfg, const VectorField& u0);

/// r_n = (E_{n+1} - E_{n-1})/(2 dt) + D_n + B_n on the per-step ledger.
struct EnergyResidual {
  double t = 0.0;
  double residual = 0.0;
};
std::vector<EnergyResidual> energy_balance(const Trajectory& traj);
std::vector<EnergyResidual> energy_balance(const std::vector<EnergyRecord>& ledger);

/// max over nodes of (|u1|/dx1 + |u2|/dx2 + |u3|/dz_local) dt.
double courant_number(const VectorField& u, double dt);

}  // namespace conslab
