#include "conslab/layer.hpp"

#include <algorithm>
#include <cmath>

#include "conslab/error.hpp"
#include "conslab/operators.hpp"

namespace conslab {

std::array<ScalarField, 2> eta_field(const VectorField& u, double alpha) {
  const VectorField w = curl(u);
  // u_h^perp = (-u2, u1)
  return {w[0] + (2.0 * alpha) * u[1], w[1] - (2.0 * alpha) * u[0]};
}

double eta_boundary_max(const VectorField& u, double alpha) {
  const auto eta = eta_field(u, alpha);
  double m = 0.0;
  for (const auto& e : eta)
    for (double v : wall_trace(e)) m = std::max(m, std::abs(v));
  return m;
}

namespace {

ScalarField dealiased(ScalarField f, bool on) {
  if (!on) return f;
  SpectralField s = to_spectral(f);
  s.truncate();
  return to_physical(s);
}

ScalarField transport(const VectorField& u, const ScalarField& f, bool dealias) {
  const VectorField gf = gradient(f);
  ScalarField r = u[0] * gf[0];
  r += u[1] * gf[1];
  r += u[2] * gf[2];
  return dealiased(std::move(r), dealias);
}

}  // namespace

std::vector<EtaResidual> eta_residual(const Trajectory& traj, double alpha, double eps, double z_limit,
                                      bool dealias, double z_min) {
  std::vector<EtaResidual> out;
  const auto& S = traj.states;
  for (const auto& s : S)
    if (!s.has_pressure()) throw InvalidArgument("eta_residual: trajectory lacks pressure snapshots");
  if (S.size() < 3) return out;
  for (std::size_t n = 1; n + 1 < S.size(); ++n) {
    const VectorField& u = S[n].u;
    const Grid& g = *u.grid();
    const auto em = eta_field(S[n - 1].u, alpha);
    const auto e0 = eta_field(u, alpha);
    const auto ep = eta_field(S[n + 1].u, alpha);
    const double dt = S[n + 1].t - S[n - 1].t;
    const VectorField w = curl(u);
    const TensorField gu = velocity_gradient(u);
    const ScalarField p = S[n].p1 + S[n].p2;
    const ScalarField perp[2] = {-1.0 * ddy(p, 2), ddy(p, 1)};
    double res = 0.0;
    for (int c = 0; c < 2; ++c) {
      ScalarField r = (1.0 / dt) * (ep[c] - em[c]);
      r += transport(u, e0[c], dealias);
      r -= eps * laplacian(e0[c]);
      ScalarField stretch = w[0] * gu[c][0];
      stretch += w[1] * gu[c][1];
      stretch += w[2] * gu[c][2];
      r -= dealiased(std::move(stretch), dealias);
      r -= (2.0 * alpha) * perp[c];
      for (std::size_t col = 0; col < g.columns(); ++col)
        for (int k = 1; k < g.Nz - 1; ++k) {
          if (g.z[k] >= z_limit) break;
          if (g.z[k] < z_min) continue;
          res = std::max(res, std::abs(r.values()[col * g.Nz + k]));
        }
    }
    out.push_back({S[n].t, res});
  }
  return out;
}

int layer_nodes(const Grid& g, double eps) {
  const double w = std::sqrt(eps);
  int n = 0;
  for (int k = 1; k < g.Nz; ++k)
    if (g.z[k] <= w) ++n;
  return n;
}

LayerProfile layer_profile(const VectorField& u_eps, const VectorField& u_euler, double eps, double t, int n_zeta,
                           double zeta_max) {
  if (!(eps > 0.0)) throw InvalidArgument("layer_profile: eps must be positive");
  if (u_eps.grid() != u_euler.grid()) {
    const Grid &a = *u_eps.grid(), &b = *u_euler.grid();
    if (a.N1 != b.N1 || a.N2 != b.N2 || a.z != b.z) throw InvalidArgument("layer_profile: grids differ");
  }
  if (n_zeta < 2) throw InvalidArgument("layer_profile: need at least 2 zeta nodes");
  const Grid& g = *u_eps.grid();
  const double s = std::sqrt(eps);
  const double zm = std::min(zeta_max, g.Zmax / s);
  LayerProfile lp;
  lp.t = t;
  lp.eps = eps;
  lp.unresolved = layer_nodes(g, eps) < 4;
  const GridPtr zg = make_grid(g.L1, g.L2, g.N1, g.N2, n_zeta, zm, 0.0);
  lp.zeta_nodes = zg->z;
  lp.V = VectorField(zg);
  for (int c = 0; c < 3; ++c) {
    const auto& a = u_eps[c].values();
    const auto& b = u_euler[c].values();
    auto& v = lp.V[c].values();
    for (std::size_t col = 0; col < g.columns(); ++col) {
      int k = 0;
      for (int q = 0; q < n_zeta; ++q) {
        const double z = std::min(s * lp.zeta_nodes[q], g.Zmax);
        while (k + 2 < g.Nz && g.z[k + 1] < z) ++k;
        const double th = (z - g.z[k]) / (g.z[k + 1] - g.z[k]);
        const std::size_t i = col * g.Nz + k;
        const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
        v[col * n_zeta + q] = ((1.0 - th) * d0 + th * d1) / s;
      }
    }
  }
  return lp;
}

ScalingFit amplitude_scaling(const std::vector<double>& eps_list, const std::vector<double>& amplitudes) {
  if (eps_list.size() != amplitudes.size()) throw InvalidArgument("amplitude_scaling: size mismatch");
  if (eps_list.size() < 4) throw InvalidArgument("amplitude_scaling: need at least 4 viscosities");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw InvalidArgument("amplitude_scaling: viscosities must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw InvalidArgument("amplitude_scaling: viscosities must be strictly decreasing");
    if (!(amplitudes[i] > 0.0) || !std::isfinite(amplitudes[i]))
      throw InvalidArgument("amplitude_scaling: degenerate amplitude");
  }
  if (std::log10(eps_list.front() / eps_list.back()) < 1.5 - 1e-12)
    throw InvalidArgument("amplitude_scaling: viscosities must span at least 1.5 decades");
  ScalingFit f;
  f.eps_list = eps_list;
  f.amplitudes = amplitudes;
  const std::size_t n = eps_list.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(eps_list[i]), y = std::log(amplitudes[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double mx = sx / n, my = sy / n;
  const double varx = sxx - n * mx * mx;
  f.slope = (sxy - n * mx * my) / varx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(eps_list[i]), y = std::log(amplitudes[i]);
    const double e = y - (f.intercept + f.slope * x);
    ss_res += e * e;
    ss_tot += (y - my) * (y - my);
  }
  f.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return f;
}

ConvergenceMetrics convergence_metrics(const VectorField& u_eps, const VectorField& u_euler) {
  const VectorField d = u_eps - u_euler;
  return {l2_norm(d), linf_norm(d)};
}

double tangential_difference_max(const VectorField& u_eps, const VectorField& u_euler) {
  double m = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto& a = u_eps[c].values();
    const auto& b = u_euler[c].values();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

double dz_tangential_max(const VectorField& u) { return std::max(linf_norm(ddz(u[0])), linf_norm(ddz(u[1]))); }

double dzz_tangential_max(const VectorField& u) { return std::max(linf_norm(d2z(u[0])), linf_norm(d2z(u[1]))); }

}  // namespace conslab
