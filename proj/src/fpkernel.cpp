#include "conslab/fpkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "conslab/banded.hpp"
#include "conslab/error.hpp"
#include "conslab/grid.hpp"

namespace conslab {

FPCoefficient FPCoefficient::constant(double gamma, double eps, double tau, double t_end) {
  FPCoefficient c;
  c.t_nodes = {tau, t_end};
  c.gamma = {gamma};
  c.eps = eps;
  c.validate();
  return c;
}

FPCoefficient FPCoefficient::from_samples(const std::vector<double>& t, const std::vector<double>& samples,
                                          double eps) {
  if (t.size() != samples.size() || t.size() < 2) throw InvalidArgument("FPCoefficient: need >= 2 matching samples");
  FPCoefficient c;
  c.t_nodes = t;
  c.eps = eps;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) c.gamma.push_back(0.5 * (samples[i] + samples[i + 1]));
  c.validate();
  return c;
}

void FPCoefficient::validate() const {
  if (t_nodes.size() < 2 || gamma.size() + 1 != t_nodes.size())
    throw InvalidArgument("FPCoefficient: need one gamma value per cell");
  for (std::size_t i = 0; i + 1 < t_nodes.size(); ++i)
    if (!(t_nodes[i + 1] > t_nodes[i])) throw InvalidArgument("FPCoefficient: time nodes must increase");
  if (!(eps > 0.0)) throw InvalidArgument("FPCoefficient: eps must be positive");
}

namespace {

std::size_t cell_of(const std::vector<double>& tn, double t) {
  if (t < tn.front() - 1e-12 || t > tn.back() + 1e-12)
    throw InvalidArgument("FPCoefficient: time outside the coefficient range");
  std::size_t i = std::upper_bound(tn.begin(), tn.end(), t) - tn.begin();
  return std::min(i == 0 ? 0 : i - 1, tn.size() - 2);
}

// expm1(x)/x, continuous at 0.
double phi1(double x) { return std::abs(x) < 1e-12 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

}  // namespace

double FPCoefficient::gamma_at(double t) const { return gamma[cell_of(t_nodes, t)]; }

double FPCoefficient::Gamma(double t) const {
  const std::size_t c = cell_of(t_nodes, t);
  double G = 0.0;
  for (std::size_t i = 0; i < c; ++i) G += gamma[i] * (t_nodes[i + 1] - t_nodes[i]);
  return G + gamma[c] * (t - t_nodes[c]);
}

double FPCoefficient::weighted_integral(double t, double c) const {
  const std::size_t last = cell_of(t_nodes, t);
  double G = 0.0, acc = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    const double h = (i == last ? t : t_nodes[i + 1]) - t_nodes[i];
    if (h > 0.0) acc += std::exp(-2.0 * c * G) * h * phi1(-2.0 * c * gamma[i] * h);
    if (i < last) G += gamma[i] * (t_nodes[i + 1] - t_nodes[i]);
  }
  return acc;
}

std::string to_string(KernelCandidate c) { return c == KernelCandidate::derived ? "derived" : "printed"; }

double FPKernel::stretch() const { return std::exp(Gamma); }
double FPKernel::stddev() const { return std::sqrt(2.0 * eps * sigma2); }
double FPKernel::operator()(double z, double zp) const {
  const double v = 4.0 * eps * sigma2;
  const double d = z - zp;
  return std::exp(-d * d / v) / std::sqrt(std::numbers::pi * v);
}

FPKernel derive_kernel(double t, const FPCoefficient& coeff, KernelCandidate c) {
  coeff.validate();
  if (t < coeff.tau()) throw InvalidArgument("derive_kernel: t must not precede tau");
  FPKernel k;
  k.eps = coeff.eps;
  k.candidate = c;
  k.Gamma = coeff.Gamma(t);
  // Characteristics z e^{-Gamma(t)} turn the equation into a heat equation with
  // diffusivity eps e^{-2 Gamma}; back in z the variance is
  // 2 eps e^{2 Gamma(t)} int e^{-2 Gamma(s)} ds.
  if (c == KernelCandidate::derived)
    k.sigma2 = std::exp(2.0 * k.Gamma) * coeff.weighted_integral(t, 1.0);
  else
    k.sigma2 = std::exp(2.0 * coeff.eps * k.Gamma) * coeff.weighted_integral(t, coeff.eps);
  return k;
}

bool FPProfile::compact() const {
  if (values.empty()) return true;
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return std::abs(values.back()) <= 1e-12 * std::max(m, 1e-300);
}

namespace {

void check_profile(const FPProfile& f) {
  if (f.z.size() != f.values.size() || f.z.size() < 3) throw InvalidArgument("FPProfile: need >= 3 matching nodes");
  if (f.z[0] != 0.0) throw InvalidArgument("FPProfile: first node must be z = 0");
  for (std::size_t i = 0; i + 1 < f.z.size(); ++i)
    if (!(f.z[i + 1] > f.z[i])) throw InvalidArgument("FPProfile: nodes must increase");
  if (f.values[0] != 0.0) throw InvalidArgument("FPProfile: f(0) must vanish");
  if (!f.compact()) throw InvalidArgument("FPProfile: f must vanish at the last node (compact support)");
}

// Largest node with a non-negligible value.
double support_edge(const FPProfile& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  for (std::size_t i = f.z.size(); i-- > 0;)
    if (std::abs(f.values[i]) > 1e-13 * m) return f.z[std::min(i + 1, f.z.size() - 1)];
  return 0.0;
}

// Convolution of N_s with the odd piecewise-linear extension of f, stretched by e^Gamma.
void convolve(const FPProfile& f, double e, double s, const std::vector<double>& zs, std::vector<double>& g,
              std::vector<double>* dg) {
  const int n = static_cast<int>(f.z.size());
  // Odd node list on the full line.
  std::vector<double> x(2 * n - 1), v(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    x[n - 1 + i] = e * f.z[i];
    v[n - 1 + i] = f.values[i];
    x[n - 1 - i] = -e * f.z[i];
    v[n - 1 - i] = -f.values[i];
  }
  g.assign(zs.size(), 0.0);
  if (dg) dg->assign(zs.size(), 0.0);
  const int m = 2 * n - 1;
  if (s <= 1e-300) {
    for (std::size_t q = 0; q < zs.size(); ++q) {
      const double z = zs[q];
      if (z <= x.front() || z >= x.back()) continue;
      const int j = static_cast<int>(std::upper_bound(x.begin(), x.end(), z) - x.begin()) - 1;
      const double sl = (v[j + 1] - v[j]) / (x[j + 1] - x[j]);
      g[q] = v[j] + sl * (z - x[j]);
      if (dg) (*dg)[q] = sl;
    }
    return;
  }
  const double r2 = 1.0 / (s * std::numbers::sqrt2);
  const double nrm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  const double win = 8.0 * s;
  for (std::size_t q = 0; q < zs.size(); ++q) {
    const double z = zs[q];
    int lo = static_cast<int>(std::lower_bound(x.begin(), x.end(), z - win) - x.begin()) - 1;
    int hi = static_cast<int>(std::upper_bound(x.begin(), x.end(), z + win) - x.begin());
    lo = std::max(lo, 0);
    hi = std::min(hi, m - 1);
    double acc = 0.0, dacc = 0.0;
    for (int j = lo; j < hi; ++j) {
      const double A = x[j] - z, B = x[j + 1] - z;
      const double sl = (v[j + 1] - v[j]) / (x[j + 1] - x[j]);
      const double P = 0.5 * (std::erf(B * r2) - std::erf(A * r2));
      const double Y = s * s * nrm * (std::exp(-A * A * r2 * r2) - std::exp(-B * B * r2 * r2));
      acc += (v[j] - sl * A) * P + sl * Y;
      dacc += sl * P;
    }
    g[q] = acc;
    if (dg) (*dg)[q] = dacc;
  }
}

}  // namespace

void fp_evaluate(const FPProfile& f0, const FPKernel& k, const std::vector<double>& z, std::vector<double>& g,
                 std::vector<double>* dz) {
  check_profile(f0);
  convolve(f0, k.stretch(), k.stddev(), z, g, dz);
}

FPProfile fp_evolve(const FPProfile& f0, const FPCoefficient& coeff, double t, KernelCandidate c,
                    std::vector<double>* dz_out) {
  check_profile(f0);
  const FPKernel k = derive_kernel(t, coeff, c);
  const double reach = support_edge(f0) * k.stretch() + 8.0 * k.stddev();
  if (reach > f0.z.back())
    throw InvalidArgument("fp_evolve: propagated support exceeds the quadrature window");
  FPProfile out;
  out.z = f0.z;
  convolve(f0, k.stretch(), k.stddev(), out.z, out.values, dz_out);
  out.values[0] = 0.0;
  return out;
}

FPProfile fp_evolve_fd(const FPProfile& f0, const FPCoefficient& coeff, double t, double dt) {
  check_profile(f0);
  if (t < coeff.tau()) throw InvalidArgument("fp_evolve_fd: t must not precede tau");
  if (!(dt > 0.0)) throw InvalidArgument("fp_evolve_fd: dt must be positive");
  const auto& z = f0.z;
  const int n = static_cast<int>(z.size());
  const double eps = coeff.eps;
  const auto d1 = first_derivative_stencils(z);
  const auto d2 = second_derivative_stencils(z);
  double hmin = z[1] - z[0];
  for (int i = 1; i + 1 < n; ++i) hmin = std::min(hmin, z[i + 1] - z[i]);
  double gmax = 0.0;
  for (double gm : coeff.gamma) gmax = std::max(gmax, std::abs(gm));
  const long nsteps = std::max(1L, static_cast<long>(std::ceil((t - coeff.tau()) / dt - 1e-9)));
  const double h = (t - coeff.tau()) / nsteps;
  if (gmax * z.back() * h / hmin > 1.0) throw InvalidArgument("fp_evolve_fd: CFL condition violated");

  // (I - h/4 eps D2) g^{+} = (I + h/4 eps D2) g, Dirichlet rows at both ends.
  BandedMatrix<double> A(n, 1, 1);
  A(0, 0) = 1.0;
  A(n - 1, n - 1) = 1.0;
  for (int i = 1; i < n - 1; ++i) {
    for (int m = 0; m < d2[i].width; ++m) A(i, d2[i].start + m) -= 0.25 * h * eps * d2[i].coef[m];
    A(i, i) += 1.0;
  }
  const BandedLU<double> lu(std::move(A));
  auto diffuse = [&](std::vector<double>& g) {
    std::vector<double> r(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      double lap = 0.0;
      for (int m = 0; m < d2[i].width; ++m) lap += d2[i].coef[m] * g[d2[i].start + m];
      r[i] = g[i] + 0.25 * h * eps * lap;
    }
    lu.solve(std::span<double>(r));
    g = std::move(r);
  };
  auto advect_rate = [&](const std::vector<double>& g, double gam, std::vector<double>& out) {
    out.assign(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      double d = 0.0;
      for (int m = 0; m < d1[i].width; ++m) d += d1[i].coef[m] * g[d1[i].start + m];
      out[i] = -z[i] * gam * d;
    }
  };
  std::vector<double> g = f0.values, k1, k2, k3, k4, tmp(n);
  for (long s = 0; s < nsteps; ++s) {
    const double tm = coeff.tau() + (s + 0.5) * h;
    const double gam = coeff.gamma_at(std::min(tm, coeff.t_nodes.back()));
    diffuse(g);
    advect_rate(g, gam, k1);
    for (int i = 0; i < n; ++i) tmp[i] = g[i] + 0.5 * h * k1[i];
    advect_rate(tmp, gam, k2);
    for (int i = 0; i < n; ++i) tmp[i] = g[i] + 0.5 * h * k2[i];
    advect_rate(tmp, gam, k3);
    for (int i = 0; i < n; ++i) tmp[i] = g[i] + h * k3[i];
    advect_rate(tmp, gam, k4);
    for (int i = 0; i < n; ++i) g[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    diffuse(g);
  }
  return {z, g};
}

double kernel_pde_residual(const FPProfile& f0, const FPCoefficient& coeff, double t, KernelCandidate c,
                           const std::vector<double>& zprobe, double h) {
  check_profile(f0);
  auto eval = [&](double tt, const std::vector<double>& zs) {
    std::vector<double> g;
    fp_evaluate(f0, derive_kernel(tt, coeff, c), zs, g);
    return g;
  };
  const double w1 = 8.0 / 12.0, w2 = -1.0 / 12.0;
  std::vector<double> gt[5];
  for (int q = -2; q <= 2; ++q) gt[q + 2] = eval(t + q * h, zprobe);
  std::vector<double> zs[5];
  std::vector<double> gz[5];
  for (int q = -2; q <= 2; ++q) {
    zs[q + 2] = zprobe;
    for (auto& zz : zs[q + 2]) zz += q * h;
    gz[q + 2] = q == 0 ? gt[2] : eval(t, zs[q + 2]);
  }
  const double gam = coeff.gamma_at(t);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < zprobe.size(); ++i) {
    const double dt_g = (w1 * (gt[3][i] - gt[1][i]) + w2 * (gt[4][i] - gt[0][i])) / h;
    const double dz_g = (w1 * (gz[3][i] - gz[1][i]) + w2 * (gz[4][i] - gz[0][i])) / h;
    const double dzz_g =
        (-gz[4][i] + 16.0 * gz[3][i] - 30.0 * gz[2][i] + 16.0 * gz[1][i] - gz[0][i]) / (12.0 * h * h);
    const double adv = zprobe[i] * gam * dz_g, dif = coeff.eps * dzz_g;
    res = std::max(res, std::abs(dt_g + adv - dif));
    scale = std::max({scale, std::abs(dt_g), std::abs(adv), std::abs(dif)});
  }
  return scale > 0.0 ? res / scale : 0.0;
}

double kernel_mass(const FPKernel& k, double z, int n) {
  const double sd = k.stddev();
  const double a = z - 8.0 * sd, b = z + 8.0 * sd;
  const double hq = (b - a) / (n - 1);
  double m = 0.0;
  for (int i = 0; i < n; ++i) m += (i == 0 || i == n - 1 ? 0.5 : 1.0) * k(z, a + i * hq);
  return m * hq;
}

std::vector<FPCase> fp_corpus(int n_cases, const std::vector<double>& eps_list, int n_nodes, double zmax,
                              unsigned long long seed) {
  if (n_cases < 1 || eps_list.empty() || n_nodes < 16) throw InvalidArgument("fp_corpus: empty corpus request");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> z(n_nodes);
  for (int i = 0; i < n_nodes; ++i) z[i] = zmax * i / (n_nodes - 1);
  std::vector<FPCase> out;
  for (int c = 0; c < n_cases; ++c) {
    FPCase fc;
    fc.id = c;
    const double eps = eps_list[c % eps_list.size()];
    // Redraw until the propagated support fits inside [0, zmax].
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw InvalidArgument("fp_corpus: zmax too small for the requested corpus");
      const int cells = 1 + static_cast<int>(U(rng) * 4.0);
      const double duration = 0.1 + 0.9 * U(rng);
      fc.coeff = FPCoefficient{};
      fc.coeff.eps = eps;
      fc.coeff.t_nodes.push_back(0.0);
      for (int k = 1; k <= cells; ++k) fc.coeff.t_nodes.push_back(duration * k / cells);
      for (int k = 0; k < cells; ++k) fc.coeff.gamma.push_back(-2.0 + 4.0 * U(rng));
      fc.t = duration;
      // f0 = z P(z) exp(-((z - shift)/width)^2) with a random quadratic P.
      const double width = 0.3 + 0.7 * U(rng);
      const double p0 = -1.0 + 2.0 * U(rng), p1 = -1.0 + 2.0 * U(rng), p2 = -1.0 + 2.0 * U(rng);
      const double shift = 0.8 * U(rng);
      fc.f0.z = z;
      fc.f0.values.resize(n_nodes);
      for (int i = 0; i < n_nodes; ++i) {
        const double x = z[i];
        const double r = (x - shift) / width;
        const double v = x * (p0 + p1 * x + p2 * x * x) * std::exp(-r * r);
        fc.f0.values[i] = std::abs(v) < 1e-300 ? 0.0 : v;
      }
      fc.f0.values[0] = 0.0;
      fc.f0.values.back() = 0.0;
      const FPKernel k = derive_kernel(fc.t, fc.coeff);
      if ((shift + 6.5 * width) * k.stretch() + 8.0 * k.stddev() <= zmax) break;
    }
    out.push_back(std::move(fc));
  }
  return out;
}

FPBoundReport check_fp_bounds(const std::vector<FPCase>& corpus) {
  if (corpus.empty()) throw InvalidArgument("check_fp_bounds: empty corpus");
  FPBoundReport rep;
  // Candidate selection on the first case that carries a nonzero profile.
  for (const auto& fc : corpus) {
    double m = 0.0;
    for (double v : fc.f0.values) m = std::max(m, std::abs(v));
    if (m == 0.0) continue;
    std::vector<double> probe;
    const double tp = 0.5 * (fc.coeff.t_nodes[0] + fc.coeff.t_nodes[1]);
    for (int i = 1; i <= 16; ++i) probe.push_back(0.15 * i);
    rep.residual_derived = kernel_pde_residual(fc.f0, fc.coeff, tp, KernelCandidate::derived, probe);
    rep.residual_printed = kernel_pde_residual(fc.f0, fc.coeff, tp, KernelCandidate::printed, probe);
    rep.kept = rep.residual_derived <= rep.residual_printed ? KernelCandidate::derived : KernelCandidate::printed;
    break;
  }
  for (const auto& fc : corpus) {
    FPCaseResult r;
    r.id = fc.id;
    r.eps = fc.coeff.eps;
    const auto& f = fc.f0;
    for (double v : f.values) r.sup_f0 = std::max(r.sup_f0, std::abs(v));
    const FPKernel k = derive_kernel(fc.t, fc.coeff, rep.kept);
    r.mass_defect = std::abs(kernel_mass(k, 0.0) - 1.0);
    rep.max_mass_defect = std::max(rep.max_mass_defect, r.mass_defect);
    if (r.sup_f0 == 0.0) {
      r.skipped = true;
      rep.cases.push_back(r);
      continue;
    }
    std::vector<double> dg;
    const FPProfile g = fp_evolve(f, fc.coeff, fc.t, rep.kept, &dg);
    const auto d1 = first_derivative_stencils(f.z);
    double zdf = 0.0, zdg = 0.0;
    for (std::size_t i = 0; i < f.z.size(); ++i) {
      double d = 0.0;
      for (int m = 0; m < d1[i].width; ++m) d += d1[i].coef[m] * f.values[d1[i].start + m];
      zdf = std::max(zdf, std::abs(f.z[i] * d));
      zdg = std::max(zdg, std::abs(f.z[i] * dg[i]));
      r.sup_g = std::max(r.sup_g, std::abs(g.values[i]));
    }
    r.max_principle_margin = r.sup_f0 - r.sup_g;
    if (r.max_principle_margin < -1e-12 * r.sup_f0) ++rep.violations;
    r.weighted_ratio = zdg / (r.sup_f0 + zdf);
    rep.C = std::max(rep.C, r.weighted_ratio);
    rep.cases.push_back(r);
  }
  return rep;
}

}  // namespace conslab
