#pragma once

#include <string>
#include <vector>

namespace conslab {

/// Piecewise-constant gamma on the cells of t_nodes, so Gamma(t) = int_tau^t gamma
/// is continuous and piecewise linear with Gamma(t_nodes[0]) = 0.
struct FPCoefficient {
  std::vector<double> t_nodes;
  std::vector<double> gamma;  ///< one value per cell
  double eps = 0.0;

  static FPCoefficient constant(double gamma, double eps, double tau, double t_end);
  /// Cell values from point samples by the trapezoid rule.
  static FPCoefficient from_samples(const std::vector<double>& t, const std::vector<double>& samples, double eps);

  double tau() const { return t_nodes.front(); }
  double gamma_at(double t) const;
  double Gamma(double t) const;
  /// int_tau^t e^{-2 c Gamma(s)} ds, evaluated cell by cell in closed form.
  double weighted_integral(double t, double c) const;
  void validate() const;
};

/// Which variance formula the kernel uses.
enum class KernelCandidate {
  derived,  ///< sigma^2 = int e^{2(Gamma(t) - Gamma(s))} ds
  printed,  ///< sigma^2 = int e^{2 eps (Gamma(t) - Gamma(s))} ds
};
std::string to_string(KernelCandidate c);

/// g(t,z) = int k(z - z') f~0(e^{-Gamma} z') dz' with
/// k(x) = (4 pi eps sigma^2)^{-1/2} exp(-x^2 / (4 eps sigma^2)).
struct FPKernel {
  double Gamma = 0.0;
  double sigma2 = 0.0;
  double eps = 0.0;
  KernelCandidate candidate = KernelCandidate::derived;

  double stretch() const;  ///< e^{Gamma}
  double stddev() const;   ///< sqrt(2 eps sigma^2)
  double operator()(double z, double zp) const;
};

/// Throws InvalidArgument for t < tau (tau is coeff.tau()).
FPKernel derive_kernel(double t, const FPCoefficient& coeff, KernelCandidate c = KernelCandidate::derived);

struct FPProfile {
  std::vector<double> z;       ///< nonnegative, strictly increasing, z[0] = 0
  std::vector<double> values;  ///< values[0] = 0
  /// Holds when the last node is (numerically) zero.
  bool compact() const;
};

/// S(t, tau) f0 with the odd extension of f0: exact integration of the kernel
/// against the piecewise-linear interpolant, window truncated at 8 standard
/// deviations. Output on f0's nodes; throws if the propagated support would
/// leave them.
FPProfile fp_evolve(const FPProfile& f0, const FPCoefficient& coeff, double t,
                    KernelCandidate c = KernelCandidate::derived, std::vector<double>* dz_out = nullptr);

/// Strang splitting: Crank-Nicolson half steps for eps d_zz around an explicit
/// Runge-Kutta step for z gamma d_z (centered differences); g = 0 at both ends.
/// Throws when |gamma| zmax dt / dz_min exceeds 1.
FPProfile fp_evolve_fd(const FPProfile& f0, const FPCoefficient& coeff, double t, double dt);

/// Relative residual of d_t g + z gamma d_z g - eps d_zz g for the kernel
/// solution, by fourth-order finite differences of g in t and z around the
/// probe points (step h).
double kernel_pde_residual(const FPProfile& f0, const FPCoefficient& coeff, double t, KernelCandidate c,
                           const std::vector<double>& zprobe, double h = 2e-3);

/// Kernel solution and its z-derivative at arbitrary points.
void fp_evaluate(const FPProfile& f0, const FPKernel& k, const std::vector<double>& z, std::vector<double>& g,
                 std::vector<double>* dz = nullptr);

/// Trapezoid mass of k(z, .) over [z - 8 sd, z + 8 sd].
double kernel_mass(const FPKernel& k, double z, int n = 4001);

struct FPCase {
  int id = 0;
  FPProfile f0;
  FPCoefficient coeff;
  double t = 0.0;
};

struct FPCaseResult {
  int id = 0;
  double eps = 0.0;
  double sup_f0 = 0.0;
  double sup_g = 0.0;
  double max_principle_margin = 0.0;  ///< sup|f0| - sup|g|, nonnegative when the principle holds
  double weighted_ratio = 0.0;  ///< |z d_z g|_inf / (|f0|_inf + |z d_z f0|_inf)
  double mass_defect = 0.0;
  bool skipped = false;
};

struct FPBoundReport {
  std::vector<FPCaseResult> cases;
  double C = 0.0;  ///< largest weighted ratio
  int violations = 0;
  double max_mass_defect = 0.0;
  KernelCandidate kept = KernelCandidate::derived;
  double residual_derived = 0.0;
  double residual_printed = 0.0;
};

/// Deterministic corpus: piecewise-constant gamma in [-2, 2], eps from eps_list,
/// compactly supported f0 with f0(0) = 0, sampled on n_nodes uniform nodes on [0, zmax].
std::vector<FPCase> fp_corpus(int n_cases, const std::vector<double>& eps_list, int n_nodes, double zmax = 12.0,
                              unsigned long long seed = 7);

FPBoundReport check_fp_bounds(const std::vector<FPCase>& corpus);

}  // namespace conslab
