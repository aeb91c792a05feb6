#pragma once

#include <string>
#include <vector>

#include "conslab/config.hpp"
#include "conslab/dynamics.hpp"
#include "conslab/layer.hpp"

namespace conslab {

struct SweepConfig {
  SimConfig base;
  InitSpec init;
  std::vector<double> eps_list;

  static SweepConfig from(const Config& c);
  void validate() const;
};

/// Per-viscosity record; every flag of the report is recomputable from these.
struct SweepEntry {
  double eps = 0.0;
  bool ok = true;
  std::string failure;
  double max_N2 = 0.0, max_N3 = 0.0;
  double max_dz_uh = 0.0, max_dzz_uh = 0.0;
  double sup_l2_diff = 0.0, sup_linf_diff = 0.0;
  double amplitude = 0.0;  ///< sup_t |(u_eps - u_0)_h|_inf
  double eta_trace_max = 0.0;
  double max_div = 0.0;
  double max_wall_u3 = 0.0;
  int layer_nodes = 0;
  std::vector<double> times, N2_trace, N3_trace;
};

struct SweepFlags {
  bool uniform_bound = false;      ///< N_2, N_3 within a factor 2 of the first entry
  bool dzz_growth = false;         ///< slope of |d_zz u_h|_inf in [-0.65, -0.35]
  bool layer_amplitude = false;    ///< slope in [0.35, 0.65] with r2 >= 0.95
  bool inviscid_limit = false;     ///< both metrics decreasing, last below 10% of |u0|
  bool eta_trace = false;          ///< eta(., 0) <= bc_tol at every viscous report
  bool invariants = false;         ///< divergence and u3(0) at every report
  bool all() const {
    return uniform_bound && dzz_growth && layer_amplitude && inviscid_limit && eta_trace && invariants;
  }
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  bool euler_ok = true;
  double euler_max_div = 0.0;
  double norm0_l2 = 0.0, norm0_linf = 0.0;
  double div_tol = 1e-8, bc_tol = 1e-6;
  double amp_slope = 0.0, amp_r2 = 0.0;
  double dzz_slope = 0.0, dzz_r2 = 0.0;
  double N2_ratio = 0.0, N3_ratio = 0.0;
  SweepFlags flags;
  /// Final fields (not serialized): Euler baseline and one per entry.
  VectorField euler_final;
  std::vector<VectorField> finals;
  double t_final = 0.0;
};

/// Recomputes fits and flags from the per-entry data.
void evaluate_flags(SweepReport& r);

SweepReport sweep(const SweepConfig& cfg);

/// Writes sweep.csv or sweep.json, plus plots/*.svg and the final snapshots
/// (euler.cslb, eps_<i>.cslb) into dir.
void emit_report(const SweepReport& r, const std::string& format, const std::string& dir);

std::string sweep_csv(const SweepReport& r);
std::string sweep_json(const SweepReport& r);
/// Per-entry data and summary numbers back from either serialization.
SweepReport parse_sweep_json(const std::string& text);
SweepReport parse_sweep_csv(const std::string& text);

}  // namespace conslab
