#include "conslab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "conslab/conormal.hpp"
#include "conslab/error.hpp"
#include "conslab/operators.hpp"
#include "conslab/pressure.hpp"

namespace conslab {

namespace {

struct SourceMode {
  int comp, m1, m2;
  double c0, c1, b, phase;
};

std::vector<SourceMode> source_modes(int id) {
  std::mt19937_64 rng(1000 + id);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<SourceMode> modes;
  const int n = 2 + id % 3;
  for (int i = 0; i < n; ++i) {
    SourceMode m;
    m.comp = static_cast<int>(U(rng) * 3.0) % 3;
    m.m1 = static_cast<int>(U(rng) * 4.0) - 1;
    m.m2 = static_cast<int>(U(rng) * 3.0);
    m.c0 = -1.0 + 2.0 * U(rng);
    m.c1 = -1.0 + 2.0 * U(rng);
    m.b = 1.2 + 1.3 * U(rng);
    m.phase = 2.0 * std::numbers::pi * U(rng);
    modes.push_back(m);
  }
  // The first case follows the textbook single-mode normal source.
  if (id == 0) modes = {{2, 1, 0, 1.0, 0.0, 1.0, 0.0}};
  return modes;
}

VectorField sample_source(const GridPtr& g, const std::vector<SourceMode>& modes) {
  VectorField F(g);
  for (int c = 0; c < 3; ++c)
    F[c] = ScalarField::sample(g, [&, c](double x1, double x2, double z) {
      double s = 0.0;
      for (const auto& m : modes)
        if (m.comp == c)
          s += std::cos(m.m1 * x1 * 2.0 * std::numbers::pi / g->L1 + m.m2 * x2 * 2.0 * std::numbers::pi / g->L2 +
                        m.phase) *
               (m.c0 + m.c1 * z) * std::exp(-m.b * z);
      return s;
    });
  return F;
}

}  // namespace

std::vector<PressureCaseResult> pressure_cases(const std::vector<int>& nz_levels) {
  if (nz_levels.size() < 2) throw InvalidArgument("pressure_cases: need at least two resolutions");
  std::vector<PressureCaseResult> out;
  for (int id = 0; id < 10; ++id) {
    PressureCaseResult r;
    r.name = "case" + std::to_string(id);
    const auto modes = source_modes(id);
    for (int nz : nz_levels) {
      const GridPtr g = make_grid(2.0 * std::numbers::pi, 2.0 * std::numbers::pi, 16, 16, nz, 12.0, 3.0);
      const VectorField F = sample_source(g, modes);
      const ScalarField pk = solve_p1_kernel(F);
      NeumannProblem prob;
      prob.rhs = divergence(F);
      prob.flux0 = spectral_trace(F[2]);
      prob.gauge = Gauge::mean_zero;
      const ScalarField pf = solve_neumann_fd(prob);
      r.nz.push_back(nz);
      r.rel_error.push_back(l2_norm(pk - pf) / l2_norm(pk));
    }
    const std::size_t n = r.rel_error.size();
    r.order = std::log2(r.rel_error[n - 2] / r.rel_error[n - 1]);
    out.push_back(std::move(r));
  }
  return out;
}

double p2_closed_vs_fd(const std::vector<double>& wavenumbers, int n_fine) {
  if (n_fine < 17 || n_fine % 4 != 1) throw InvalidArgument("p2_closed_vs_fd: n_fine must be 4j+1 and >= 17");
  double worst = 0.0;
  const double alpha = 0.7, eps = 0.05;
  const cplx trace_dot(0.3, -0.8);  // (xi/|xi|) . u_h^(xi, 0)
  for (double k : wavenumbers) {
    const double zcut = 30.0 / k;
    auto nodes = [&](int n) {
      std::vector<double> z(n);
      for (int i = 0; i < n; ++i) z[i] = zcut * i / (n - 1);
      return z;
    };
    // Neumann datum d_z p2(0) = -2 alpha eps i xi . u_h(0) = -2 alpha eps i k (trace_dot).
    const cplx flux = -2.0 * alpha * eps * cplx(0.0, k) * trace_dot;
    auto solve = [&](int n) { return solve_mode_fd(nodes(n), k, std::vector<cplx>(n, 0.0), flux); };
    const int n_mid = (n_fine + 1) / 2, n_coarse = (n_fine + 3) / 4;
    const auto pf = solve(n_fine), pm = solve(n_mid), pc = solve(n_coarse);
    const auto zc = nodes(n_coarse);
    const cplx amp = cplx(0.0, 2.0 * alpha * eps) * trace_dot;
    // The one-sided boundary rows leave an h^3 term after the h^2 one, so two
    // extrapolation steps are needed.
    double err = 0.0;
    for (int i = 0; i < n_coarse; ++i) {
      const cplx r_fine = (4.0 * pf[4 * i] - pm[2 * i]) / 3.0;
      const cplx r_mid = (4.0 * pm[2 * i] - pc[i]) / 3.0;
      const cplx rich = (8.0 * r_fine - r_mid) / 7.0;
      err = std::max(err, std::abs(rich - amp * std::exp(-k * zc[i])));
    }
    worst = std::max(worst, err / std::abs(amp));
  }
  return worst;
}

FPCheckResult fp_check(int n_cases, int n_nodes, double zmax) {
  FPCheckResult r;
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  r.coarse = check_fp_bounds(fp_corpus(n_cases, eps, n_nodes, zmax));
  r.fine = check_fp_bounds(fp_corpus(n_cases, eps, 2 * n_nodes - 1, zmax));
  r.C_change = r.coarse.C > 0.0 ? std::abs(r.fine.C - r.coarse.C) / r.coarse.C : 0.0;
  return r;
}

double embedding_constant(const GridPtr& grid, int n_fields, int m0, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double k1 = 2.0 * std::numbers::pi / grid->L1, k2 = 2.0 * std::numbers::pi / grid->L2;
  double worst = 0.0;
  for (int f = 0; f < n_fields; ++f) {
    struct Term {
      int m1, m2, a;
      double c, b, ph;
    };
    std::vector<Term> terms;
    const int nt = 1 + static_cast<int>(U(rng) * 4.0);
    for (int t = 0; t < nt; ++t)
      terms.push_back({static_cast<int>(U(rng) * 7.0) - 3, static_cast<int>(U(rng) * 4.0), static_cast<int>(U(rng) * 3.0),
                       -1.0 + 2.0 * U(rng), 0.5 + 2.5 * U(rng), 2.0 * std::numbers::pi * U(rng)});
    const ScalarField fld = ScalarField::sample(grid, [&](double x1, double x2, double z) {
      double s = 0.0;
      for (const auto& t : terms)
        s += t.c * std::cos(t.m1 * k1 * x1 + t.m2 * k2 * x2 + t.ph) * std::pow(z, t.a) * std::exp(-t.b * z);
      return s;
    });
    const EmbeddingSides e = embedding_check(fld, m0);
    if (e.rhs > 0.0) worst = std::max(worst, e.lhs / e.rhs);
  }
  return worst;
}

}  // namespace conslab
