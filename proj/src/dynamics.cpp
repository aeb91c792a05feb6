#include "conslab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "conslab/banded.hpp"
#include "conslab/error.hpp"
#include "conslab/layer.hpp"
#include "conslab/operators.hpp"
#include "conslab/pressure.hpp"

namespace conslab {

void SimConfig::validate() const {
  if (!grid) throw InvalidArgument("SimConfig: grid not set");
  if (!(dt > 0.0)) throw InvalidArgument("SimConfig: dt must be positive");
  if (!(T >= 0.0)) throw InvalidArgument("SimConfig: T must be nonnegative");
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("SimConfig: eps must lie in [0, 1]");
  if (!(std::abs(alpha) <= 1.0)) throw InvalidArgument("SimConfig: |alpha| must be <= 1");
  if (!(sponge_start < grid->Zmax)) throw InvalidArgument("SimConfig: sponge_start must be below Zmax");
  if (sponge_rate < 0.0) throw InvalidArgument("SimConfig: sponge_rate must be nonnegative");
  if (diag_every < 1) throw InvalidArgument("SimConfig: diag_every must be >= 1");
  if (m < 1 || m > kDefaultMaxOrder) throw InvalidArgument("SimConfig: m must lie in [1, 4]");
  if (grid->Nz < 6) throw InvalidArgument("SimConfig: Nz must be >= 6");
  const double n = T / dt;
  if (std::abs(n - std::round(n)) > 1e-8 * std::max(1.0, n))
    throw InvalidArgument("SimConfig: T must be an integer multiple of dt");
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "shear") return InitKind::shear;
  if (s == "perturbed_shear") return InitKind::perturbed_shear;
  if (s == "vortex_pair") return InitKind::vortex_pair;
  throw InvalidArgument("unknown initial data kind '" + s + "'");
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::shear:
      return "shear";
    case InitKind::perturbed_shear:
      return "perturbed_shear";
    case InitKind::vortex_pair:
      return "vortex_pair";
  }
  return "?";
}

namespace {

ScalarField truncated(const ScalarField& f) {
  SpectralField s = to_spectral(f);
  s.truncate();
  return to_physical(s);
}

// u = curl(psi1, psi2, psi3) with the discrete operators; their exact
// commutation makes the discrete divergence vanish to rounding.
VectorField curl_of_potential(const ScalarField& psi1, const ScalarField& psi2, const ScalarField& psi3) {
  VectorField psi(truncated(psi1), truncated(psi2), truncated(psi3));
  return curl(psi);
}

}  // namespace

VectorField make_initial_data(InitKind kind, double amplitude, const GridPtr& grid, unsigned long long seed) {
  if (!grid) throw InvalidArgument("make_initial_data: grid not set");
  const Grid& g = *grid;
  const double k1 = 2.0 * std::numbers::pi / g.L1, k2 = 2.0 * std::numbers::pi / g.L2;
  switch (kind) {
    case InitKind::shear: {
      VectorField u(grid);
      u[0] = ScalarField::sample(grid, [&](double, double, double z) {
        return amplitude * std::tanh(z) * std::exp(-z / 5.0);
      });
      return u;
    }
    case InitKind::perturbed_shear: {
      // The base tanh^2 profile has zero value and slope at the wall, so it is
      // compatible with the Navier row for every alpha.
      VectorField u(grid);
      u[0] = ScalarField::sample(grid, [&](double, double, double z) {
        const double t = std::tanh(z);
        return amplitude * t * t * std::exp(-z / 2.0);
      });
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> weight(-1.0, 1.0);
      struct Mode {
        int m1, m2;
        double c1, c2, ph1, ph2;
      };
      std::vector<Mode> modes;
      for (int m1 = 0; m1 <= 2; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2) {
          if (m1 == 0 && m2 <= 0) continue;
          modes.push_back({m1, m2, weight(rng), weight(rng), phase(rng), phase(rng)});
        }
      const double delta = 0.5 * amplitude / std::sqrt(static_cast<double>(modes.size()));
      auto potential = [&](int comp) {
        return ScalarField::sample(grid, [&, comp](double x1, double x2, double z) {
          double s = 0.0;
          for (const auto& md : modes) {
            const double arg = md.m1 * k1 * x1 + md.m2 * k2 * x2;
            s += comp == 0 ? md.c1 * std::cos(arg + md.ph1) : md.c2 * std::cos(arg + md.ph2);
          }
          return delta * s * z * z * z * std::exp(-1.5 * z);
        });
      };
      return u + curl_of_potential(potential(0), potential(1), ScalarField(grid));
    }
    case InitKind::vortex_pair: {
      const double kappa = 2.0;
      const double a1 = 0.5 * g.L1, b1 = 0.35 * g.L2, b2 = 0.65 * g.L2;
      const double norm = std::exp(2.0 * kappa);
      auto blob = [&](double x1, double x2, double c1, double c2) {
        return std::exp(kappa * (std::cos(k1 * (x1 - c1)) + std::cos(k2 * (x2 - c2)))) / norm;
      };
      ScalarField psi3 = ScalarField::sample(grid, [&](double x1, double x2, double z) {
        return amplitude * (blob(x1, x2, a1, b1) - blob(x1, x2, a1, b2)) * z * z * std::exp(-z);
      });
      return curl_of_potential(ScalarField(grid), ScalarField(grid), psi3);
    }
  }
  throw InvalidArgument("make_initial_data: unknown kind");
}

double strain_norm_sq(const TensorField& grad) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ScalarField e = grad[i][j];
      e += grad[j][i];
      e *= 0.5;
      s += inner(e, e);
    }
  return s;
}

VectorField navier_bc_apply(const VectorField& u, double alpha) {
  const Grid& g = *u.grid();
  const Stencil& s = g.d1[0];
  const double denom = s.coef[0] - 2.0 * alpha;
  if (std::abs(denom) < 1e-12 * std::abs(s.coef[0]))
    throw NumericalError("navier_bc_apply: Robin row is degenerate");
  VectorField r = u;
  for (int c = 0; c < 2; ++c) {
    auto& v = r[c].values();
    for (std::size_t col = 0; col < g.columns(); ++col) {
      double rest = 0.0;
      for (int m = 1; m < s.width; ++m) rest += s.coef[m] * v[col * g.Nz + s.start + m];
      v[col * g.Nz] = -rest / denom;
    }
  }
  auto& w = r[2].values();
  for (std::size_t col = 0; col < g.columns(); ++col) w[col * g.Nz] = 0.0;
  return r;
}

double robin_residual(const VectorField& u, double alpha) {
  const Grid& g = *u.grid();
  const Stencil& s = g.d1[0];
  double r = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto& v = u[c].values();
    for (std::size_t col = 0; col < g.columns(); ++col) {
      double d = 0.0;
      for (int m = 0; m < s.width; ++m) d += s.coef[m] * v[col * g.Nz + s.start + m];
      r = std::max(r, std::abs(d - 2.0 * alpha * v[col * g.Nz]));
    }
  }
  return r;
}

EnergyRecord energy_record(const VectorField& u, double t, double eps, double alpha) {
  const Grid& g = *u.grid();
  EnergyRecord e;
  e.t = t;
  e.kinetic = 0.5 * (inner(u[0], u[0]) + inner(u[1], u[1]) + inner(u[2], u[2]));
  e.dissipation = eps > 0.0 ? 2.0 * eps * strain_norm_sq(u) : 0.0;
  double wall = 0.0;
  for (std::size_t c = 0; c < g.columns(); ++c) {
    const double a = u[0].values()[c * g.Nz], b = u[1].values()[c * g.Nz];
    wall += a * a + b * b;
  }
  e.boundary = 2.0 * alpha * eps * wall * g.area() / static_cast<double>(g.columns());
  return e;
}

double courant_number(const VectorField& u, double dt) {
  const Grid& g = *u.grid();
  const double dx1 = g.L1 / g.N1, dx2 = g.L2 / g.N2;
  std::vector<double> dz(g.Nz);
  for (int k = 0; k < g.Nz; ++k) {
    const double lo = k > 0 ? g.z[k] - g.z[k - 1] : g.z[1] - g.z[0];
    const double hi = k + 1 < g.Nz ? g.z[k + 1] - g.z[k] : lo;
    dz[k] = std::min(lo, hi);
  }
  double c = 0.0;
  for (std::size_t col = 0; col < g.columns(); ++col)
    for (int k = 0; k < g.Nz; ++k) {
      const std::size_t i = col * g.Nz + k;
      c = std::max(c, std::abs(u[0].values()[i]) / dx1 + std::abs(u[1].values()[i]) / dx2 +
                          std::abs(u[2].values()[i]) / dz[k]);
    }
  return c * dt;
}

// ---------------------------------------------------------------------------

namespace {

// Centred wall-normal derivative that is skew with respect to the trapezoid
// weights: W D + (W D)^T = diag(-1, 0, ..., 0, 1). Only the advection and the
// cross terms of the strain use it; everything reported uses `ddz`.
void sbp_ddz_column(const std::vector<double>& z, const double* f, double* out) {
  const int n = static_cast<int>(z.size());
  out[0] = (f[1] - f[0]) / (z[1] - z[0]);
  for (int k = 1; k < n - 1; ++k) out[k] = (f[k + 1] - f[k - 1]) / (z[k + 1] - z[k - 1]);
  out[n - 1] = (f[n - 1] - f[n - 2]) / (z[n - 1] - z[n - 2]);
}

ScalarField sbp_ddz(const ScalarField& f) {
  const Grid& g = f.g();
  ScalarField out(f.grid());
  for (std::size_t c = 0; c < g.columns(); ++c)
    sbp_ddz_column(g.z, f.values().data() + c * g.Nz, out.values().data() + c * g.Nz);
  return out;
}

ScalarField truncated(const SpectralField& s) {
  SpectralField t = s;
  t.truncate();
  return to_physical(t);
}

// -1/2 [ u_j d_j u_i + d_j (u_j u_i) ], dealiased. For band-limited u the
// horizontal part is exactly skew under the grid quadrature and the normal
// part under the trapezoid, so (u, A(u)) reduces to the top-row flux.
VectorField skew_advection(const VectorField& u) {
  const GridPtr& gp = u.grid();
  VectorField A(gp);
  for (int i = 0; i < 3; ++i) {
    ScalarField acc(gp);
    for (int j = 0; j < 3; ++j) {
      acc += u[j] * (j < 2 ? ddy(u[i], j + 1) : sbp_ddz(u[i]));
      const ScalarField prod = u[j] * u[i];
      acc += j < 2 ? ddy(prod, j + 1) : sbp_ddz(prod);
    }
    acc *= -0.5;
    A[i] = truncated(to_spectral(acc));
  }
  return A;
}

// Sum over columns of (f_{k+1} - f_k)^2 / h_{k+1/2}, times the cell area:
// the quadrature of |d_z f|^2 on cell edges.
double edge_gradient_sq(const ScalarField& f) {
  const Grid& g = f.g();
  double s = 0.0;
  for (std::size_t c = 0; c < g.columns(); ++c) {
    const double* v = f.values().data() + c * g.Nz;
    for (int k = 0; k + 1 < g.Nz; ++k) {
      const double d = v[k + 1] - v[k];
      s += d * d / (g.z[k + 1] - g.z[k]);
    }
  }
  return s * g.area() / static_cast<double>(g.columns());
}

struct Term {
  int idx;
  cplx coef;
};

// Saddle-point system of one horizontal mode,
//   [ W (I - a L)  C^* ] [u     ]   [W b]
//   [ C            0   ] [lambda] = [ 0 ],
// unknowns interleaved by level (u1, u2, u3, lambda_k) after the global
// multipliers so the matrix is banded.
struct ModeSystem {
  int j1 = 0, j2 = 0;
  int ng = 0;  // global constraint rows (u3(0) = 0, Navier rows)
  std::vector<std::vector<Term>> rows;  // constraint rows in unknown indices (global first, then per level)
  BandedLU<cplx> lu;
  int size = 0;

  int vel(int c, int k) const { return ng + 4 * k + c; }
  int lam(int k) const { return ng + 4 * k + 3; }
};

struct SystemOptions {
  double a = 0.0;  // dt eps / 2; zero gives the plain W-orthogonal projection
  double alpha = 0.0;
  bool navier = false;
};

ModeSystem build_mode(const Grid& g, int j1, int j2, const SystemOptions& o) {
  const int N = g.Nz;
  const double xi1 = g.xi1(j1), xi2 = g.xi2(j2);
  const bool zero = xi1 == 0.0 && xi2 == 0.0;
  ModeSystem S;
  S.j1 = j1;
  S.j2 = j2;
  S.ng = (zero ? 0 : 1) + (o.navier ? 2 : 0);
  S.size = S.ng + 4 * N;

  std::vector<int> row_index;  // unknown slot holding each constraint's multiplier
  std::vector<std::vector<Term>> forcing;  // how each multiplier enters the momentum rows
  int gslot = 0;
  if (!zero) {
    S.rows.push_back({{S.vel(2, 0), cplx(1.0)}});
    row_index.push_back(gslot++);
  }
  if (o.navier)
    for (int c = 0; c < 2; ++c) {
      std::vector<Term> r;
      const Stencil& b = g.d1[0];
      for (int m = 0; m < b.width; ++m)
        r.push_back({S.vel(c, b.start + m), cplx(b.coef[m] - (b.start + m == 0 ? 2.0 * o.alpha : 0.0))});
      S.rows.push_back(std::move(r));
      row_index.push_back(gslot++);
    }
  forcing = S.rows;
  for (int k = 0; k < N; ++k) {
    std::vector<Term> r, f;
    if (zero) {
      r.push_back({S.vel(2, k), cplx(1.0)});
      f = r;
    } else {
      r.push_back({S.vel(0, k), cplx(0.0, xi1)});
      r.push_back({S.vel(1, k), cplx(0.0, xi2)});
      f = r;
      const Stencil& s = g.d1[k];
      for (int m = 0; m < s.width; ++m) r.push_back({S.vel(2, s.start + m), cplx(s.coef[m])});
      // In the wall row the multiplier pushes u3 through the two-point
      // summation-by-parts difference, not the adjoint of the one-sided
      // stencil; that adjoint drives a sawtooth next to the wall which nothing
      // damps at eps = 0. Interior rows stay symmetric so the pressure work
      // vanishes up to the wall row.
      if (k == 0) {
        const double h = g.z[1] - g.z[0];
        f.push_back({S.vel(2, 0), cplx(-1.0 / h)});
        f.push_back({S.vel(2, 1), cplx(1.0 / h)});
      } else {
        for (int m = 0; m < s.width; ++m) f.push_back({S.vel(2, s.start + m), cplx(s.coef[m])});
      }
    }
    S.rows.push_back(std::move(r));
    forcing.push_back(std::move(f));
    row_index.push_back(S.lam(k));
  }

  // Operator block W (I - a L) with the flux-form L; Navier flux on u_h.
  std::vector<std::tuple<int, int, cplx>> entries;
  const auto& w = g.zweights;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < N; ++k) {
      double diag = w[k];
      if (o.a > 0.0) {
        if (k > 0) {
          const double t = 1.0 / (g.z[k] - g.z[k - 1]);
          diag += o.a * t;
          entries.push_back({S.vel(c, k), S.vel(c, k - 1), cplx(-o.a * t)});
        }
        if (k + 1 < N) {
          const double t = 1.0 / (g.z[k + 1] - g.z[k]);
          diag += o.a * t;
          entries.push_back({S.vel(c, k), S.vel(c, k + 1), cplx(-o.a * t)});
        }
        if (k == 0 && c < 2) diag += o.a * 2.0 * o.alpha;
      }
      entries.push_back({S.vel(c, k), S.vel(c, k), cplx(diag)});
    }
  for (std::size_t r = 0; r < S.rows.size(); ++r) {
    for (const auto& t : S.rows[r]) entries.push_back({row_index[r], t.idx, t.coef});
    for (const auto& t : forcing[r]) entries.push_back({t.idx, row_index[r], std::conj(t.coef)});
  }
  int bw = 0;
  for (const auto& [i, j, v] : entries) bw = std::max(bw, std::abs(i - j));
  BandedMatrix<cplx> K(S.size, bw, bw);
  for (const auto& [i, j, v] : entries) K(i, j) += v;
  // Rows stored as multiplier slots for later residual evaluation.
  for (std::size_t r = 0; r < S.rows.size(); ++r) S.rows[r].insert(S.rows[r].begin(), {row_index[r], cplx(0.0)});
  S.lu = BandedLU<cplx>(std::move(K));
  return S;
}

// Solves one mode in place. rhs[c][k] holds b; on return U holds the new
// column. Returns the largest constraint defect of b.
double solve_mode(const ModeSystem& S, const Grid& g, const std::array<std::vector<cplx>, 3>& b,
                  std::array<SpectralField, 3>& U, std::vector<cplx>& work) {
  const int N = g.Nz;
  work.assign(S.size, cplx(0.0));
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < N; ++k) work[S.vel(c, k)] = g.zweights[k] * b[c][k];
  double defect = 0.0;
  for (const auto& r : S.rows) {
    cplx s = 0.0;
    for (std::size_t t = 1; t < r.size(); ++t) s += r[t].coef * b[(r[t].idx - S.ng) % 4][(r[t].idx - S.ng) / 4];
    defect = std::max(defect, std::abs(s));
  }
  S.lu.solve(std::span<cplx>(work));
  for (int c = 0; c < 3; ++c) {
    auto col = U[c].column(S.j1, S.j2);
    for (int k = 0; k < N; ++k) col[k] = work[S.vel(c, k)];
  }
  // The wall row of u3 is a constraint; drop the rounding left by the solve.
  U[2].column(S.j1, S.j2)[0] = 0.0;
  return defect;
}

std::vector<ModeSystem> build_all(const Grid& g, const SystemOptions& o) {
  std::vector<ModeSystem> out;
  for (int j1 = 0; j1 < g.N1; ++j1)
    for (int j2 = 0; j2 < g.nky(); ++j2)
      if (g.kept(j1, j2)) out.push_back(build_mode(g, j1, j2, o));
  return out;
}

}  // namespace

struct Integrator::Impl {
  GridPtr grid;
  bool viscous = false;
  std::vector<ModeSystem> bdf2;     // W (I - 2 dt eps L / 3)
  std::vector<ModeSystem> startup;  // W (I - gamma dt eps L), built for the first step only
  std::vector<double> sponge;       // per z-level factor
  std::array<SpectralField, 3> prevE, prevU;
  bool have_prev = false;

  void build(const SimConfig& cfg);
  std::array<SpectralField, 3> explicit_rhs(const VectorField& u, const std::array<SpectralField, 3>& U,
                                            const SimConfig& cfg) const;
  // Solves every kept mode; fill(S, c, k, u, e) returns b for one entry.
  template <class Fill>
  std::array<SpectralField, 3> solve(const std::vector<ModeSystem>& sys, Fill&& fill, double* defect) const;
};

void Integrator::Impl::build(const SimConfig& cfg) {
  grid = cfg.grid;
  const Grid& g = *grid;
  viscous = cfg.eps > 0.0;
  bdf2 = build_all(g, {viscous ? 2.0 * cfg.dt * cfg.eps / 3.0 : 0.0, cfg.alpha, viscous});
  sponge.assign(g.Nz, 1.0);
  if (cfg.sponge_rate > 0.0)
    for (int k = 0; k < g.Nz; ++k)
      if (g.z[k] > cfg.sponge_start) {
        const double r = (g.z[k] - cfg.sponge_start) / (g.Zmax - cfg.sponge_start);
        sponge[k] = std::exp(-cfg.sponge_rate * cfg.dt * r * r);
      }
  have_prev = false;
}

std::array<SpectralField, 3> Integrator::Impl::explicit_rhs(const VectorField& u,
                                                            const std::array<SpectralField, 3>& U,
                                                            const SimConfig& cfg) const {
  const Grid& g = *grid;
  const VectorField A = skew_advection(u);
  std::array<SpectralField, 3> E{to_spectral(A[0]), to_spectral(A[1]), to_spectral(A[2])};
  if (viscous)
    for_each_mode(g, [&](int j1, int j2, double xi1, double xi2) {
      const double lap = -(xi1 * xi1 + xi2 * xi2) * cfg.eps;
      for (int c = 0; c < 3; ++c) {
        auto e = E[c].column(j1, j2);
        const auto v = U[c].column(j1, j2);
        for (int k = 0; k < g.Nz; ++k) e[k] += lap * v[k];
      }
    });
  for (auto& e : E) e.truncate();
  return E;
}

template <class Fill>
std::array<SpectralField, 3> Integrator::Impl::solve(const std::vector<ModeSystem>& sys, Fill&& fill,
                                                     double* defect) const {
  const Grid& g = *grid;
  std::array<SpectralField, 3> out{SpectralField(grid), SpectralField(grid), SpectralField(grid)};
  std::array<std::vector<cplx>, 3> b;
  for (auto& v : b) v.resize(g.Nz);
  std::vector<cplx> work;
  double d = 0.0;
  for (const ModeSystem& S : sys) {
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < g.Nz; ++k) b[c][k] = sponge[k] * fill(S, c, k);
    d = std::max(d, solve_mode(S, g, b, out, work));
  }
  if (defect) *defect = d;
  return out;
}

namespace {

// Flux-form (L u)_k on one spectral column: edge differences, Navier flux at
// the wall for the tangential components, no flux through the top.
cplx flux_laplacian(const Grid& g, std::span<const cplx> u, int k, bool tangential, double alpha) {
  const int N = g.Nz;
  const cplx lo = k > 0 ? (u[k] - u[k - 1]) / (g.z[k] - g.z[k - 1]) : (tangential ? 2.0 * alpha * u[0] : cplx(0.0));
  const cplx hi = k + 1 < N ? (u[k + 1] - u[k]) / (g.z[k + 1] - g.z[k]) : cplx(0.0);
  return (hi - lo) / g.zweights[k];
}

}  // namespace

Integrator::Integrator(SimConfig cfg) : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {
  cfg_.validate();
  impl_->build(cfg_);
}
Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

void Integrator::reset() { impl_->have_prev = false; }

VectorField Integrator::project(const VectorField& u, double* correction) const {
  const Grid& g = *impl_->grid;
  const std::vector<ModeSystem> P = build_all(g, {0.0, cfg_.alpha, impl_->viscous});
  std::array<SpectralField, 3> U{to_spectral(u[0]), to_spectral(u[1]), to_spectral(u[2])};
  std::array<SpectralField, 3> out{SpectralField(u.grid()), SpectralField(u.grid()), SpectralField(u.grid())};
  std::array<std::vector<cplx>, 3> b;
  std::vector<cplx> work;
  double d = 0.0;
  for (const ModeSystem& S : P) {
    for (int c = 0; c < 3; ++c) {
      const auto col = U[c].column(S.j1, S.j2);
      b[c].assign(col.begin(), col.end());
    }
    d = std::max(d, solve_mode(S, g, b, out, work));
  }
  if (correction) *correction = d;
  return VectorField(to_physical(out[0]), to_physical(out[1]), to_physical(out[2]));
}

void Integrator::attach_pressure(State& s) const {
  PressureSplit ps = pressure_split(s.u, cfg_.alpha, cfg_.eps, cfg_.dealias);
  s.p1 = std::move(ps.p1);
  s.p2 = std::move(ps.p2);
}

State Integrator::step(const State& s, StepDiagnostics* diag) {
  const double dt = cfg_.dt;
  const double cfl = courant_number(s.u, dt);
  if (!std::isfinite(cfl)) throw NumericalError("step: non-finite velocity at t = " + std::to_string(s.t));
  if (cfl > cfg_.cfl_max)
    throw NumericalError("step: CFL number " + std::to_string(cfl) + " exceeds " + std::to_string(cfg_.cfl_max) +
                         " at t = " + std::to_string(s.t));

  std::array<SpectralField, 3> U{to_spectral(s.u[0]), to_spectral(s.u[1]), to_spectral(s.u[2])};
  for (auto& c : U) c.truncate();
  const std::array<SpectralField, 3> E = impl_->explicit_rhs(s.u, U, cfg_);
  Impl& m = *impl_;
  const double eps = m.viscous ? cfg_.eps : 0.0, alpha = cfg_.alpha;
  auto col = [](const SpectralField& f, const ModeSystem& S) { return f.column(S.j1, S.j2); };

  double defect = 0.0;
  std::array<SpectralField, 3> Unew;
  if (m.have_prev) {
    // SBDF2: (3u' - 4u + u_prev) / (2 dt) = 2E - E_prev + eps L u'. BDF2 damps
    // the stiff wall modes that the Navier constraint excites.
    Unew = m.solve(
        m.bdf2,
        [&](const ModeSystem& S, int c, int k) {
          return (4.0 * col(U[c], S)[k] - col(m.prevU[c], S)[k]) / 3.0 +
                 (2.0 * dt / 3.0) * (2.0 * col(E[c], S)[k] - col(m.prevE[c], S)[k]);
        },
        &defect);
  } else {
    // First step: the L-stable two-stage IMEX scheme of Ascher, Ruuth and
    // Spiteri, second order with no history needed.
    const double gam = 1.0 - 1.0 / std::sqrt(2.0), del = 1.0 - 1.0 / (2.0 * gam);
    if (m.startup.empty()) m.startup = build_all(*m.grid, {gam * dt * eps, alpha, m.viscous});
    const auto U1 = m.solve(
        m.startup, [&](const ModeSystem& S, int c, int k) { return col(U[c], S)[k] + gam * dt * col(E[c], S)[k]; },
        nullptr);
    const VectorField u1(to_physical(U1[0]), to_physical(U1[1]), to_physical(U1[2]));
    const auto E1 = m.explicit_rhs(u1, U1, cfg_);
    Unew = m.solve(
        m.startup,
        [&](const ModeSystem& S, int c, int k) {
          const cplx lu = eps > 0.0 ? flux_laplacian(*m.grid, col(U1[c], S), k, c < 2, alpha) : cplx(0.0);
          return col(U[c], S)[k] + dt * (del * col(E[c], S)[k] + (1.0 - del) * col(E1[c], S)[k]) +
                 (1.0 - gam) * dt * eps * lu;
        },
        &defect);
    m.startup.clear();
    m.startup.shrink_to_fit();
  }
  m.prevE = E;
  m.prevU = U;
  m.have_prev = true;

  State out;
  out.t = s.t + dt;
  out.u = VectorField(to_physical(Unew[0]), to_physical(Unew[1]), to_physical(Unew[2]));
  if (!out.u.all_finite()) throw NumericalError("step: NaN detected at t = " + std::to_string(out.t));
  if (diag) {
    diag->cfl = cfl;
    diag->correction = defect;
    diag->divergence = linf_norm(divergence(out.u));
    diag->wall_normal = out.u.wall_normal_trace_max();
    diag->robin = impl_->viscous ? robin_residual(out.u, cfg_.alpha) : 0.0;
  }
  return out;
}

// 2|Su|^2 = |grad u|^2 + sum_ij (d_j u_i, d_i u_j). The squares of normal
// derivatives are integrated on cell edges, which is what the flux-form
// diffusion dissipates; the cross sum pairs derivatives under the skew
// normal derivative, where it reduces to boundary terms.
double strain_norm_sq(const VectorField& u) {
  std::array<std::array<ScalarField, 3>, 3> d;
  double sq = 0.0;
  for (int i = 0; i < 3; ++i) {
    d[i][0] = ddy(u[i], 1);
    d[i][1] = ddy(u[i], 2);
    d[i][2] = sbp_ddz(u[i]);
    sq += inner(d[i][0], d[i][0]) + inner(d[i][1], d[i][1]) + edge_gradient_sq(u[i]);
  }
  double cross = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cross += inner(d[i][j], d[j][i]);
  return 0.5 * (sq + cross);
}

State step(const State& s, const SimConfig& cfg) {
  Integrator integ(cfg);
  return integ.step(s);
}

State euler_step(const State& s, const SimConfig& cfg) {
  SimConfig c = cfg;
  c.eps = 0.0;
  Integrator integ(c);
  return integ.step(s);
}

namespace {

StepDiagnostics state_diagnostics(const VectorField& u, const SimConfig& cfg) {
  StepDiagnostics d;
  d.divergence = linf_norm(divergence(u));
  d.wall_normal = u.wall_normal_trace_max();
  d.robin = cfg.eps > 0.0 ? robin_residual(u, cfg.alpha) : 0.0;
  d.cfl = courant_number(u, cfg.dt);
  return d;
}

}  // namespace

Trajectory run(const SimConfig& cfg, const VectorField& u0) {
  Integrator integ(cfg);
  Trajectory traj;
  State s;
  s.t = 0.0;
  double corr = 0.0;
  s.u = integ.project(u0, &corr);
  const long nsteps = std::lround(cfg.T / cfg.dt);

  auto record = [&](State st, double correction) {
    integ.attach_pressure(st);
    traj.reports.push_back(conormal_report(st.u, cfg.m, st.t, cfg.alpha));
    StepDiagnostics d = state_diagnostics(st.u, cfg);
    d.correction = correction;
    traj.diagnostics.push_back(d);
    traj.states.push_back(std::move(st));
  };
  traj.energy.push_back(energy_record(s.u, s.t, cfg.eps, cfg.alpha));
  record(s, corr);
  try {
    for (long n = 1; n <= nsteps; ++n) {
      StepDiagnostics d;
      const bool report = n % cfg.diag_every == 0 || n == nsteps;
      State next = integ.step(s, report ? &d : nullptr);
      next.t = n * cfg.dt;
      s = std::move(next);
      traj.energy.push_back(energy_record(s.u, s.t, cfg.eps, cfg.alpha));
      if (report) record(s, d.correction);
    }
  } catch (const Error& e) {
    traj.failed = true;
    traj.failure = e.what();
  }
  return traj;
}

std::vector<EnergyResidual> energy_balance(const std::vector<EnergyRecord>& ledger) {
  if (ledger.size() < 3) throw InvalidArgument("energy_balance: need at least 3 ledger entries");
  std::vector<EnergyResidual> r;
  for (std::size_t n = 1; n + 1 < ledger.size(); ++n) {
    const double dt = ledger[n + 1].t - ledger[n - 1].t;
    const double dEdt = (ledger[n + 1].kinetic - ledger[n - 1].kinetic) / dt;
    r.push_back({ledger[n].t, dEdt + ledger[n].dissipation + ledger[n].boundary});
  }
  return r;
}

std::vector<EnergyResidual> energy_balance(const Trajectory& traj) { return energy_balance(traj.energy); }

}  // namespace conslab
