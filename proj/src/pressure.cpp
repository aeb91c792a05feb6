#include "conslab/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "conslab/banded.hpp"
#include "conslab/error.hpp"
#include "conslab/operators.hpp"

namespace conslab {

namespace {

// Cumulative trapezoid pieces of the separable kernel, in scaled form so that
// no cosh(kz) is ever formed explicitly.
void kernel_column_fast(const std::vector<double>& z, double k, std::span<const cplx> a,
                        std::span<const cplx> F3, std::span<cplx> out) {
  const int n = static_cast<int>(z.size());
  std::vector<cplx> Ua(n), UF(n), La(n), LF(n);
  for (int i = n - 2; i >= 0; --i) {
    const double h = z[i + 1] - z[i];
    const double e = std::exp(-k * h);
    Ua[i] = e * Ua[i + 1] + 0.5 * h * (a[i] + e * a[i + 1]);
    UF[i] = e * UF[i + 1] + 0.5 * h * (F3[i] + e * F3[i + 1]);
  }
  auto ch = [&](int j) { return 0.5 * (1.0 + std::exp(-2.0 * k * z[j])); };
  auto sh = [&](int j) { return 0.5 * (1.0 - std::exp(-2.0 * k * z[j])); };
  for (int i = 1; i < n; ++i) {
    const double h = z[i] - z[i - 1];
    const double e = std::exp(-k * h);
    La[i] = e * La[i - 1] + 0.5 * h * (e * ch(i - 1) * a[i - 1] + ch(i) * a[i]);
    LF[i] = e * LF[i - 1] + 0.5 * h * (e * sh(i - 1) * F3[i - 1] + sh(i) * F3[i]);
  }
  for (int i = 0; i < n; ++i)
    out[i] = -(ch(i) * Ua[i] + La[i]) / k - ch(i) * UF[i] + LF[i];
}

void kernel_column_direct(const std::vector<double>& z, double k, std::span<const cplx> a,
                          std::span<const cplx> F3, std::span<cplx> out) {
  const int n = static_cast<int>(z.size());
  for (int i = 0; i < n; ++i) {
    const double zi = z[i];
    // Upper branch (z < z'): G_h = -cosh(kz)e^{-kz'}/k, G_3 = -cosh(kz)e^{-kz'}.
    // Lower branch (z > z'): G_h = -e^{-kz}cosh(kz')/k, G_3 = e^{-kz}sinh(kz').
    auto upper = [&](int j) {
      const double g = 0.5 * (std::exp(-k * (z[j] - zi)) + std::exp(-k * (z[j] + zi)));
      return -g * a[j] / k - g * F3[j];
    };
    auto lower = [&](int j) {
      const double c = 0.5 * (std::exp(-k * (zi - z[j])) + std::exp(-k * (zi + z[j])));
      const double s = 0.5 * (std::exp(-k * (zi - z[j])) - std::exp(-k * (zi + z[j])));
      return -c * a[j] / k + s * F3[j];
    };
    cplx acc = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
      const double h = z[j + 1] - z[j];
      acc += j >= i ? 0.5 * h * (upper(j) + upper(j + 1)) : 0.5 * h * (lower(j) + lower(j + 1));
    }
    out[i] = acc;
  }
}

void zero_mode_column(const std::vector<double>& z, const std::vector<double>& w,
                      std::span<const cplx> F3, std::span<cplx> out) {
  // p'' = F3', p'(0) = F3(0)  =>  p' = F3.
  const int n = static_cast<int>(z.size());
  out[0] = 0.0;
  for (int i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * (z[i] - z[i - 1]) * (F3[i] + F3[i - 1]);
  cplx mean = 0.0;
  double len = 0.0;
  for (int i = 0; i < n; ++i) {
    mean += w[i] * out[i];
    len += w[i];
  }
  mean /= len;
  for (int i = 0; i < n; ++i) out[i] -= mean;
}

double top_decay_ratio(const VectorField& F) {
  const Grid& g = *F.grid();
  double top = 0.0, all = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto& v = F[i].values();
    for (std::size_t c = 0; c < g.columns(); ++c) top = std::max(top, std::abs(v[c * g.Nz + g.Nz - 1]));
    all = std::max(all, linf_norm(F[i]));
  }
  return all > 0.0 ? top / all : 0.0;
}

}  // namespace

void kernel_column(const std::vector<double>& z, const std::vector<double>& w, double k,
                   std::span<const cplx> a, std::span<const cplx> F3, std::span<cplx> out, bool fast) {
  if (k <= 0.0) {
    zero_mode_column(z, w, F3, out);
    return;
  }
  if (fast)
    kernel_column_fast(z, k, a, F3, out);
  else
    kernel_column_direct(z, k, a, F3, out);
}

void solve_p1_kernel_spectral(const Grid& g, const SpectralField& F1, const SpectralField& F2,
                              const SpectralField& F3, SpectralField& p, bool fast) {
  std::vector<cplx> a(g.Nz);
  for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
    auto out = p.column(j1, j2);
    if (g.is_nyquist(j1, j2)) {
      std::fill(out.begin(), out.end(), cplx(0.0));
      return;
    }
    const auto f1 = F1.column(j1, j2), f2 = F2.column(j1, j2);
    for (int k = 0; k < g.Nz; ++k) a[k] = cplx(0.0, xi1) * f1[k] + cplx(0.0, xi2) * f2[k];
    kernel_column(g.z, g.zweights, std::hypot(xi1, xi2), a, F3.column(j1, j2), out, fast);
  });
}

ScalarField solve_p1_kernel(const VectorField& F, const KernelOptions& opt, bool* nondecaying) {
  const GridPtr& gp = F.grid();
  const bool bad = top_decay_ratio(F) > opt.decay_tol;
  if (nondecaying) *nondecaying = bad;
  if (bad && opt.strict) throw NumericalError("solve_p1_kernel: F does not decay toward Zmax");
  SpectralField p(gp);
  solve_p1_kernel_spectral(*gp, to_spectral(F[0]), to_spectral(F[1]), to_spectral(F[2]), p, opt.fast);
  return to_physical(p);
}

void solve_p2_closed_spectral(const Grid& g, const std::vector<cplx>& trace1, const std::vector<cplx>& trace2,
                              double alpha, double eps, SpectralField& p) {
  if (trace1.size() != g.spectral_columns() || trace2.size() != g.spectral_columns())
    throw InvalidArgument("solve_p2_closed: trace size mismatch");
  for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
    auto out = p.column(j1, j2);
    const double k = std::hypot(xi1, xi2);
    if (k == 0.0 || g.is_nyquist(j1, j2) || alpha == 0.0 || eps == 0.0) {
      std::fill(out.begin(), out.end(), cplx(0.0));
      return;
    }
    const std::size_t c = static_cast<std::size_t>(j1) * g.nky() + j2;
    const cplx amp = cplx(0.0, 2.0 * alpha * eps) * (xi1 * trace1[c] + xi2 * trace2[c]) / k;
    for (int i = 0; i < g.Nz; ++i) out[i] = amp * std::exp(-k * g.z[i]);
  });
}

ScalarField solve_p2_closed(const GridPtr& grid, const std::vector<cplx>& trace1,
                            const std::vector<cplx>& trace2, double alpha, double eps) {
  SpectralField p(grid);
  solve_p2_closed_spectral(*grid, trace1, trace2, alpha, eps, p);
  return to_physical(p);
}

std::vector<cplx> solve_mode_fd(const std::vector<double>& z, double k, std::span<const cplx> rhs, cplx flux0) {
  const int n = static_cast<int>(z.size());
  if (n < 4) throw InvalidArgument("solve_mode_fd: need at least 4 nodes");
  const auto d1 = first_derivative_stencils(z);
  const auto d2 = second_derivative_stencils(z);
  BandedMatrix<double> A(n, 2, 2);
  std::vector<cplx> b(n);
  auto put = [&](int row, const Stencil& s) {
    for (int m = 0; m < s.width; ++m) A(row, s.start + m) += s.coef[m];
  };
  put(0, d1[0]);
  b[0] = flux0;
  for (int i = 1; i < n - 1; ++i) {
    put(i, d2[i]);
    A(i, i) -= k * k;
    b[i] = rhs[i];
  }
  if (k > 0.0) {
    put(n - 1, d1[n - 1]);
    A(n - 1, n - 1) += k;
  } else {
    A(n - 1, n - 1) = 1.0;
  }
  BandedLU<double> lu(std::move(A));
  lu.solve(std::span<cplx>(b));
  return b;
}

ScalarField solve_neumann_fd(const NeumannProblem& prob) {
  if (prob.gauge == Gauge::none)
    throw InvalidArgument("solve_neumann_fd: the zero mode is singular without a gauge");
  const GridPtr& gp = prob.rhs.grid();
  const Grid& g = *gp;
  if (prob.flux0.size() != g.spectral_columns()) throw InvalidArgument("solve_neumann_fd: flux0 size mismatch");
  const SpectralField r = to_spectral(prob.rhs);
  SpectralField p(gp);
  for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
    auto out = p.column(j1, j2);
    if (g.is_nyquist(j1, j2)) return;
    const std::size_t c = static_cast<std::size_t>(j1) * g.nky() + j2;
    const double k = std::hypot(xi1, xi2);
    auto sol = solve_mode_fd(g.z, k, r.column(j1, j2), prob.flux0[c]);
    if (k == 0.0) {
      cplx mean = 0.0;
      for (int i = 0; i < g.Nz; ++i) mean += g.zweights[i] * sol[i];
      mean /= g.Zmax;
      for (auto& v : sol) v -= mean;
    }
    std::copy(sol.begin(), sol.end(), out.begin());
  });
  return to_physical(p);
}

VectorField advection(const VectorField& u, bool dealias) {
  const TensorField grad = velocity_gradient(u);
  VectorField F(u.grid());
  for (int i = 0; i < 3; ++i) {
    auto& out = F[i].values();
    for (int j = 0; j < 3; ++j) {
      const auto& uj = u[j].values();
      const auto& dj = grad[i][j].values();
      for (std::size_t n = 0; n < out.size(); ++n) out[n] -= uj[n] * dj[n];
    }
    if (dealias) {
      SpectralField s = to_spectral(F[i]);
      s.truncate();
      F[i] = to_physical(s);
    }
  }
  return F;
}

std::vector<cplx> spectral_trace(const ScalarField& f) {
  const Grid& g = f.g();
  std::vector<cplx> t(g.spectral_columns());
  g.fft().forward_plane(wall_trace(f), t);
  return t;
}

PressureSplit pressure_split(const VectorField& u, double alpha, double eps, bool dealias) {
  PressureSplit s;
  const VectorField F = advection(u, dealias);
  s.p1 = solve_p1_kernel(F, {}, &s.nondecaying);
  s.p2 = solve_p2_closed(u.grid(), spectral_trace(u[0]), spectral_trace(u[1]), alpha, eps);
  return s;
}

double kernel_l1_bound(double k, const std::vector<double>& zsamples, double zcut, int n) {
  if (k <= 0.0) throw InvalidArgument("kernel_l1_bound: |xi| must be positive");
  double best = 0.0;
  const double h = zcut / n;
  for (double z : zsamples) {
    // |xi| |G|: horizontal entry has modulus e^{-k z>} cosh(k z<), normal entry
    // e^{-k z>} cosh or sinh. K = d_z G differentiates the z-dependence.
    double g1 = 0.0, kk = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double zp = j * h;
      const double wj = (j == 0 || j == n) ? 0.5 * h : h;
      double gh, g3, kh, k3;
      if (z < zp) {
        const double c = 0.5 * (std::exp(-k * (zp - z)) + std::exp(-k * (zp + z)));
        const double s = 0.5 * (std::exp(-k * (zp - z)) - std::exp(-k * (zp + z)));
        gh = c;  // |e^{-kz'} cosh(kz) / k * i xi|
        g3 = c;
        kh = s * k;  // d_z of the horizontal entry, times |xi|/k
        k3 = s * k;
      } else {
        const double c = 0.5 * (std::exp(-k * (z - zp)) + std::exp(-k * (z + zp)));
        const double s = 0.5 * (std::exp(-k * (z - zp)) - std::exp(-k * (z + zp)));
        gh = c;
        g3 = s;
        kh = c * k;
        k3 = s * k;
      }
      g1 += wj * (gh + g3);
      kk += wj * (kh + k3);
    }
    best = std::max(best, kk + k * g1);
  }
  return best;
}

}  // namespace conslab
