#pragma once

#include <string>
#include <vector>

#include "conslab/fpkernel.hpp"
#include "conslab/grid.hpp"

namespace conslab {

/// Kernel against finite-difference pressure on one manufactured source,
/// at several Nz (each entry doubles the previous one).
struct PressureCaseResult {
  std::string name;
  std::vector<int> nz;
  std::vector<double> rel_error;  ///< |p_kernel - p_fd| / |p_kernel| in L2
  double order = 0.0;             ///< log2 ratio of the last two errors
};

/// Ten decaying sources F = sum of a few Fourier modes times (c0 + c1 z) e^{-b z}.
std::vector<PressureCaseResult> pressure_cases(const std::vector<int>& nz_levels = {64, 128, 256});

/// Closed-form p2 mode against the one-mode FD Laplace solve on a fine uniform
/// grid with one Richardson step; returns the largest relative difference over
/// the sampled wavenumbers.
double p2_closed_vs_fd(const std::vector<double>& wavenumbers, int n_fine = 4001);

struct FPCheckResult {
  FPBoundReport coarse, fine;
  double C_change = 0.0;  ///< |C_fine - C_coarse| / C_coarse
};
FPCheckResult fp_check(int n_cases = 60, int n_nodes = 1201, double zmax = 12.0);

/// Largest |f|_inf^2 / (|d_z f|_m0 |f|_m0 + |f|_m0^2) over random band-limited fields.
double embedding_constant(const GridPtr& grid, int n_fields, int m0 = 2, unsigned long long seed = 11);

}  // namespace conslab
