#include "conslab/conormal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conslab/error.hpp"
#include "conslab/layer.hpp"
#include "conslab/operators.hpp"
#include "conslab/spectral.hpp"

namespace conslab {

std::vector<MultiIndex> multi_indices(int m) {
  std::vector<MultiIndex> out;
  for (int order = 0; order <= m; ++order)
    for (int a1 = order; a1 >= 0; --a1)
      for (int a2 = order - a1; a2 >= 0; --a2) out.push_back({a1, a2, order - a1 - a2});
  return out;
}

namespace {

ScalarField apply_Z3(const ScalarField& f) {
  ScalarField r = ddz(f);
  const Grid& g = f.g();
  auto& v = r.values();
  for (std::size_t c = 0; c < g.columns(); ++c)
    for (int k = 0; k < g.Nz; ++k) v[c * g.Nz + k] *= ConormalWeight::phi(g.z[k]);
  // phi(0) = 0 exactly; keep the wall row exactly zero.
  for (std::size_t c = 0; c < g.columns(); ++c) v[c * g.Nz] = 0.0;
  return r;
}

cplx ipow(cplx base, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

ScalarField spectral_derivative(const ScalarField& f, int a1, int a2) {
  if (a1 == 0 && a2 == 0) return f;
  const Grid& g = f.g();
  SpectralField s = to_spectral(f);
  for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
    const cplx factor =
        g.is_nyquist(j1, j2) ? cplx(0.0) : ipow(cplx(0.0, xi1), a1) * ipow(cplx(0.0, xi2), a2);
    for (auto& v : s.column(j1, j2)) v *= factor;
  });
  return to_physical(s);
}

}  // namespace

ScalarField apply_Z(const ScalarField& f, int i) {
  switch (i) {
    case 1:
      return ddy(f, 1);
    case 2:
      return ddy(f, 2);
    case 3:
      return apply_Z3(f);
    default:
      throw InvalidArgument("apply_Z: index must be 1, 2 or 3");
  }
}

ScalarField apply_Z_multi(const ScalarField& f, const MultiIndex& alpha, int m_max) {
  if (alpha.a1 < 0 || alpha.a2 < 0 || alpha.a3 < 0)
    throw InvalidArgument("apply_Z_multi: negative multi-index");
  if (alpha.order() > m_max)
    throw InvalidArgument("apply_Z_multi: |alpha| = " + std::to_string(alpha.order()) +
                          " exceeds m_max = " + std::to_string(m_max));
  ScalarField r = f;
  for (int i = 0; i < alpha.a3; ++i) r = apply_Z3(r);
  return spectral_derivative(r, alpha.a1, alpha.a2);
}

std::vector<double> conormal_norms_sq(const ScalarField& f, int m) {
  if (m < 0) throw InvalidArgument("conormal_norm: negative order");
  const Grid& g = f.g();
  std::vector<double> by_order(m + 1, 0.0);
  ScalarField z3 = f;
  for (int a3 = 0; a3 <= m; ++a3) {
    if (a3 > 0) z3 = apply_Z3(z3);
    const SpectralField s = to_spectral(z3);
    // Per-mode z-integrated energy, then weighted by |xi1|^{2a1} |xi2|^{2a2}.
    for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
      const auto col = s.column(j1, j2);
      double e = 0.0;
      for (int k = 0; k < g.Nz; ++k) e += g.zweights[k] * std::norm(col[k]);
      e *= parseval_weight(g, j2) * g.area();
      const bool nyq = g.is_nyquist(j1, j2);
      for (int a1 = 0; a1 + a3 <= m; ++a1)
        for (int a2 = 0; a1 + a2 + a3 <= m; ++a2) {
          if (nyq && a1 + a2 > 0) continue;
          by_order[a1 + a2 + a3] +=
              e * std::pow(xi1 * xi1, a1) * std::pow(xi2 * xi2, a2);
        }
    });
  }
  std::vector<double> cumulative(m + 1);
  double acc = 0.0;
  for (int k = 0; k <= m; ++k) cumulative[k] = (acc += by_order[k]);
  return cumulative;
}

double conormal_norm(const ScalarField& f, int m) { return std::sqrt(conormal_norms_sq(f, m)[m]); }

double conormal_norm(const VectorField& u, int m) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += conormal_norms_sq(u[i], m)[m];
  return std::sqrt(s);
}

double conormal_sup(const ScalarField& f, int k) {
  double s = 0.0;
  for (const auto& a : multi_indices(k)) s += linf_norm(apply_Z_multi(f, a, k));
  return s;
}

double conormal_sup(const VectorField& u, int k) {
  double s = 0.0;
  for (const auto& a : multi_indices(k))
    s += std::max({linf_norm(apply_Z_multi(u[0], a, k)), linf_norm(apply_Z_multi(u[1], a, k)),
                   linf_norm(apply_Z_multi(u[2], a, k))});
  return s;
}

namespace {

// Componentwise maxima over the nine entries of grad u.
double tensor_conormal_sup(const TensorField& t, int k) {
  double s = 0.0;
  for (const auto& a : multi_indices(k)) {
    double mx = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mx = std::max(mx, linf_norm(apply_Z_multi(t[i][j], a, k)));
    s += mx;
  }
  return s;
}

}  // namespace

double N_m(const VectorField& u, int m) {
  if (m < 1) throw InvalidArgument("N_m: m must be >= 1");
  double nu = 0.0;
  for (int i = 0; i < 3; ++i) nu += conormal_norms_sq(u[i], m)[m];
  const TensorField grad = velocity_gradient(u);
  double ng = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ng += conormal_norms_sq(grad[i][j], m - 1)[m - 1];
  const double gs = tensor_conormal_sup(grad, 1);
  return nu + ng + gs * gs;
}

ConormalReport conormal_report(const VectorField& u, int m, double t, double alpha) {
  if (m < 1) throw InvalidArgument("conormal_report: m must be >= 1");
  ConormalReport r;
  r.t = t;
  r.m = m;
  r.norm_m.assign(m + 1, 0.0);
  r.grad_norm.assign(m, 0.0);
  for (int i = 0; i < 3; ++i) {
    const auto n = conormal_norms_sq(u[i], m);
    for (int k = 0; k <= m; ++k) r.norm_m[k] += n[k];
  }
  const TensorField grad = velocity_gradient(u);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto n = conormal_norms_sq(grad[i][j], m - 1);
      for (int k = 0; k < m; ++k) r.grad_norm[k] += n[k];
    }
  for (auto& v : r.norm_m) v = std::sqrt(v);
  for (auto& v : r.grad_norm) v = std::sqrt(v);
  r.sup_k[0] = conormal_sup(u, 0);
  r.sup_k[1] = conormal_sup(u, 1);
  r.grad_sup[0] = tensor_conormal_sup(grad, 0);
  r.grad_sup[1] = tensor_conormal_sup(grad, 1);
  r.N_m = r.norm_m[m] * r.norm_m[m] + r.grad_norm[m - 1] * r.grad_norm[m - 1] +
          r.grad_sup[1] * r.grad_sup[1];
  r.eta_boundary_max = eta_boundary_max(u, alpha);
  return r;
}

std::string conormal_csv_header(int m) {
  std::ostringstream os;
  os << "t";
  for (int k = 0; k <= m; ++k) os << ",norm_" << k;
  for (int k = 0; k < m; ++k) os << ",grad_norm_" << k;
  os << ",sup_0,sup_1,grad_sup_0,grad_sup_1,N_m,eta_boundary_max";
  return os.str();
}

std::string to_csv_row(const ConormalReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.t;
  for (double v : r.norm_m) os << ',' << v;
  for (double v : r.grad_norm) os << ',' << v;
  os << ',' << r.sup_k[0] << ',' << r.sup_k[1] << ',' << r.grad_sup[0] << ',' << r.grad_sup[1] << ','
     << r.N_m << ',' << r.eta_boundary_max;
  return os.str();
}

CommutatorResidual check_commutator_identities(const ScalarField& f) {
  const Grid& g = f.g();
  if (g.Nz < 6) throw InvalidArgument("check_commutator_identities: Nz must be >= 6");
  const ScalarField z3f = apply_Z(f, 3);
  const ScalarField fz = ddz(f);
  const ScalarField fzz = d2z(f);

  ScalarField lhs_l = apply_Z(laplacian(f), 3) - laplacian(z3f);
  const VectorField u(f, f, f);
  const VectorField z3u(z3f, z3f, z3f);
  ScalarField lhs_d = apply_Z(divergence(u), 3) - divergence(z3u);

  CommutatorResidual res;
  for (std::size_t c = 0; c < g.columns(); ++c)
    for (int k = 1; k < g.Nz - 1; ++k) {
      const std::size_t i = c * g.Nz + k;
      const double z = g.z[k];
      const double rl = lhs_l.values()[i] -
                        (-2.0 * ConormalWeight::dphi(z) * fzz.values()[i] - ConormalWeight::d2phi(z) * fz.values()[i]);
      const double rd = lhs_d.values()[i] + ConormalWeight::dphi(z) * fz.values()[i];
      res.laplace = std::max(res.laplace, std::abs(rl));
      res.divergence = std::max(res.divergence, std::abs(rd));
    }
  return res;
}

EmbeddingSides embedding_check(const ScalarField& f, int m0) {
  if (m0 < 2) throw InvalidArgument("embedding_check: m0 must be >= 2");
  const double sup = linf_norm(f);
  const double nf = conormal_norm(f, m0);
  const double ndz = conormal_norm(ddz(f), m0);
  return {sup * sup, ndz * nf + nf * nf};
}

}  // namespace conslab
