#include <gtest/gtest.h>

#include <cmath>

#include "conslab/dynamics.hpp"
#include "conslab/error.hpp"
#include "conslab/operators.hpp"
#include "util.hpp"

using namespace conslab;
using namespace testutil;
namespace {

SimConfig config(const GridPtr& g, double eps, double alpha, double dt, double T) {
  SimConfig c;
  c.grid = g;
  c.eps = eps;
  c.alpha = alpha;
  c.dt = dt;
  c.T = T;
  c.sponge_start = 0.8 * g->Zmax;
  c.diag_every = 1000000;
  return c;
}

double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a[c], b[c]));
  return m;
}

TEST(SimConfig, RejectsViolatedInvariants) {
  const auto g = slab(16);
  auto bad = [&](auto edit) {
    SimConfig c = config(g, 0.01, 0.5, 0.01, 0.1);
    edit(c);
    EXPECT_THROW(c.validate(), InvalidArgument);
  };
  bad([](SimConfig& c) { c.dt = 0; });
  bad([](SimConfig& c) { c.alpha = 1.5; });
  bad([](SimConfig& c) { c.eps = -1e-3; });
  bad([&](SimConfig& c) { c.sponge_start = g->Zmax; });
  bad([](SimConfig& c) { c.T = 0.105; });
  EXPECT_NO_THROW(config(g, 0.01, -1.0, 0.01, 0.1).validate());
}

TEST(InitialData, ShearIsTangentAndSolenoidal) {
  const auto g = slab(32);
  const auto u = make_initial_data(InitKind::shear, 1.0, g);
  EXPECT_EQ(linf_norm(divergence(u)), 0.0);
  EXPECT_EQ(linf_norm(u[2]), 0.0);
  EXPECT_NEAR(u[0].at(3, 4, 5), std::tanh(g->z[5]) * std::exp(-g->z[5] / 5), 1e-15);
}

TEST(InitialData, PotentialBuiltKindsAreDiscretelySolenoidal) {
  const auto g = slab(48);
  for (auto kind : {InitKind::perturbed_shear, InitKind::vortex_pair}) {
    const auto u = make_initial_data(kind, 1.0, g);
    EXPECT_LE(linf_norm(divergence(u)), 1e-12) << to_string(kind);
    EXPECT_EQ(u.wall_normal_trace_max(), 0.0);
    EXPECT_GT(l2_norm(u), 0.0);
  }
}

TEST(InitialData, ZeroAmplitudeAndKindNames) {
  const auto g = slab(16);
  for (auto kind : {InitKind::shear, InitKind::perturbed_shear, InitKind::vortex_pair}) {
    EXPECT_EQ(linf_norm(make_initial_data(kind, 0.0, g)), 0.0);
    EXPECT_EQ(parse_init_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_init_kind("jet"), InvalidArgument);
}

TEST(Strain, RigidTranslationIsFree) {
  const auto g = slab(24);
  const VectorField u(ScalarField(g, 1.0), ScalarField(g, -2.0), ScalarField(g, 0.0));
  EXPECT_LT(strain_norm_sq(velocity_gradient(u)), 1e-24);
  EXPECT_LT(strain_norm_sq(u), 1e-24);
}

TEST(Strain, PureShearIsHalfTheShearSquared) {
  const auto g = slab(256);
  auto w = [](double z) { return z * std::exp(-z); };
  auto dw = [](double z) { return (1 - z) * std::exp(-z); };
  const VectorField u(ScalarField::sample(g, [&](double, double, double z) { return w(z); }), ScalarField(g), ScalarField(g));
  const double want = 0.5 * g->area() * fine_z_integral([&](double z) { return dw(z) * dw(z); }, g->Zmax);
  EXPECT_NEAR(strain_norm_sq(velocity_gradient(u)), want, 1e-3 * want);
  EXPECT_NEAR(strain_norm_sq(u), want, 1e-3 * want);
}

TEST(Strain, StretchingCellAgainstQuadrature) {
  // u = (sin x1, -sin x2, 0) W(z): horizontal mean of |Su|^2 is W^2 + W'^2/2.
  const auto g = slab(256);
  auto W = [](double z) { return std::exp(-z * z / 4) * z; };
  auto dW = [](double z) { return (1 - z * z / 2) * std::exp(-z * z / 4); };
  const VectorField u(ScalarField::sample(g, [&](double x1, double, double z) { return std::sin(x1) * W(z); }),
                      ScalarField::sample(g, [&](double, double x2, double z) { return -std::sin(x2) * W(z); }),
                      ScalarField(g));
  const double want =
      g->area() * fine_z_integral([&](double z) { return W(z) * W(z) + 0.5 * dW(z) * dW(z); }, g->Zmax);
  EXPECT_NEAR(strain_norm_sq(velocity_gradient(u)), want, 1e-3 * want);
  EXPECT_NEAR(strain_norm_sq(u), want, 1e-3 * want);
}

TEST(NavierBc, ExactRobinProfileNearlyUnchanged) {
  const double alpha = 0.5;
  std::vector<double> err;
  for (int nz : {64, 128, 256}) {
    const auto g = slab(nz);
    auto f = [&](double x1, double, double z) { return std::cos(x1) * std::exp(2 * alpha * z) * std::exp(-z * z); };
    // e^{-z^2} has zero slope at the wall, so the Robin row still holds.
    const VectorField u(ScalarField::sample(g, f), ScalarField::sample(g, f), ScalarField(g));
    err.push_back(max_diff(navier_bc_apply(u, alpha), u));
  }
  EXPECT_LT(err.back(), 1e-4);
  EXPECT_GT(err[1] / err[2], 3.0);
}

TEST(NavierBc, ZeroSlipIsZeroSlopeExtrapolation) {
  const auto g = slab(32);
  const VectorField u(band_limited(g, 1), band_limited(g, 2), band_limited(g, 3));
  const auto r = navier_bc_apply(u, 0.0);
  const Stencil& s = g->d1[0];
  ASSERT_EQ(s.start, 0);
  const double c0 = s.coef[0], c1 = s.coef[1], c2 = s.coef[2];
  for (int c = 0; c < 2; ++c) {
    const double want = -(c1 * u[c].at(2, 5, 1) + c2 * u[c].at(2, 5, 2)) / c0;
    EXPECT_NEAR(r[c].at(2, 5, 0), want, 1e-13);
  }
}

TEST(NavierBc, ResidualVanishesByConstruction) {
  const auto g = slab(32);
  for (double alpha : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    const VectorField u(band_limited(g, 4), band_limited(g, 5), band_limited(g, 6));
    const auto r = navier_bc_apply(u, alpha);
    EXPECT_LE(robin_residual(r, alpha), 1e-12);
    EXPECT_EQ(r.wall_normal_trace_max(), 0.0);
  }
}

TEST(Step, ZeroStaysZero) {
  const auto g = slab(24);
  State s;
  s.u = VectorField(g);
  const auto n = step(s, config(g, 0.01, 0.5, 0.01, 0.1));
  EXPECT_EQ(linf_norm(n.u), 0.0);
  EXPECT_NEAR(n.t, 0.01, 1e-15);
  EXPECT_EQ(linf_norm(euler_step(s, config(g, 0.0, 0.5, 0.01, 0.1)).u), 0.0);
}

TEST(Step, KeepsAdmissibleSet) {
  const auto g = slab(48);
  const auto cfg = config(g, 0.01, 0.5, 0.01, 0.05);
  Integrator integ(cfg);
  State s;
  s.u = integ.project(make_initial_data(InitKind::perturbed_shear, 1.0, g));
  for (int n = 0; n < 5; ++n) {
    StepDiagnostics d;
    s = integ.step(s, &d);
    EXPECT_LE(d.divergence, cfg.div_tol);
    EXPECT_EQ(d.wall_normal, 0.0);
    EXPECT_LE(d.robin, cfg.bc_tol);
    EXPECT_LE(linf_norm(divergence(s.u)), cfg.div_tol);
  }
}

TEST(Step, InviscidLimitEqualsEulerStep) {
  const auto g = slab(32);
  const auto cfg = config(g, 0.0, 0.5, 0.01, 0.1);
  State s;
  s.u = Integrator(cfg).project(make_initial_data(InitKind::perturbed_shear, 1.0, g));
  EXPECT_LT(max_diff(step(s, cfg).u, euler_step(s, cfg).u), 1e-14);
}

TEST(Step, TimeRefinementAtLeastFirstOrder) {
  const auto g = slab(32);
  const auto u0 = make_initial_data(InitKind::perturbed_shear, 1.0, g);
  std::vector<VectorField> sol;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    const auto tr = run(config(g, 0.01, 0.5, dt, 0.1), u0);
    ASSERT_FALSE(tr.failed) << tr.failure;
    sol.push_back(tr.states.back().u);
  }
  const double d0 = max_diff(sol[0], sol[1]), d1 = max_diff(sol[1], sol[2]), d2 = max_diff(sol[2], sol[3]);
  EXPECT_GE(d0 / d1, 2.0);
  EXPECT_GE(d1 / d2, 3.0);  // second order once the start-up step is negligible
}

TEST(Step, CflViolationAborts) {
  const auto g = slab(24);
  auto cfg = config(g, 0.01, 0.5, 0.5, 1.0);
  const auto tr = run(cfg, make_initial_data(InitKind::perturbed_shear, 5.0, g));
  EXPECT_TRUE(tr.failed);
  EXPECT_NE(tr.failure.find("CFL"), std::string::npos);
  EXPECT_EQ(tr.states.size(), 1u);
}

TEST(Courant, UniformFlow) {
  const auto g = slab(16);
  const VectorField u(ScalarField(g, 2.0), ScalarField(g), ScalarField(g));
  EXPECT_NEAR(courant_number(u, 0.01), 2.0 * 0.01 * g->N1 / g->L1, 1e-14);
}

TEST(Euler, EnergyDefectSecondOrderInTime) {
  const auto g = slab(32);
  const auto u0 = make_initial_data(InitKind::perturbed_shear, 2.0, g);
  std::vector<double> defect;
  for (double dt : {0.04, 0.02, 0.01}) {
    const auto tr = run(config(g, 0.0, 0.5, dt, 0.4), u0);
    ASSERT_FALSE(tr.failed) << tr.failure;
    defect.push_back(std::abs(tr.energy.back().kinetic - tr.energy.front().kinetic) / tr.energy.front().kinetic);
  }
  EXPECT_LT(defect.back(), 1e-5);
  EXPECT_GE(defect[0] / defect[1], 3.0);
  EXPECT_GE(defect[1] / defect[2], 3.0);
}

TEST(Euler, SpatialEnergyFloorShrinksWithResolution) {
  // Off-axis vortices leave a dt-independent defect set by the z truncation.
  std::vector<double> defect;
  for (int nz : {32, 64}) {
    const auto g = slab(nz);
    const auto tr = run(config(g, 0.0, 0.5, 0.01, 0.4), make_initial_data(InitKind::vortex_pair, 2.0, g));
    ASSERT_FALSE(tr.failed) << tr.failure;
    defect.push_back(std::abs(tr.energy.back().kinetic - tr.energy.front().kinetic) / tr.energy.front().kinetic);
  }
  EXPECT_LT(defect.back(), 1e-5);
  EXPECT_GE(defect[0] / defect[1], 3.0);
}

TEST(Euler, HorizontalShearLayersAreSteady) {
  // (U(z), V(z), 0) has u.grad u = 0, so the one-dimensional reduction is
  // an exact steady state of the discrete Euler step.
  const auto g = slab(48);
  const VectorField u0(ScalarField::sample(g, [](double, double, double z) { return std::tanh(z) * std::exp(-z / 3); }),
                       ScalarField::sample(g, [](double, double, double z) { return z * z * std::exp(-z); }),
                       ScalarField(g));
  const auto tr = run(config(g, 0.0, 0.5, 0.02, 0.4), u0);
  ASSERT_FALSE(tr.failed) << tr.failure;
  EXPECT_LT(max_diff(tr.states.back().u, u0), 1e-12);
}

TEST(Run, ZeroHorizonKeepsInitialStateOnly) {
  const auto g = slab(24);
  const auto tr = run(config(g, 0.01, 0.5, 0.01, 0.0), make_initial_data(InitKind::shear, 1.0, g));
  ASSERT_EQ(tr.states.size(), 1u);
  EXPECT_EQ(tr.reports.size(), 1u);
  EXPECT_EQ(tr.energy.size(), 1u);
  EXPECT_EQ(tr.states[0].t, 0.0);
  EXPECT_TRUE(tr.states[0].has_pressure());
}

TEST(Run, BitIdenticalRepeat) {
  const auto g = slab(24);
  auto cfg = config(g, 0.01, 0.5, 0.01, 0.05);
  const auto u0 = make_initial_data(InitKind::perturbed_shear, 1.0, g);
  const auto a = run(cfg, u0), b = run(cfg, u0);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(a.states.back().u[c].values(), b.states.back().u[c].values());
  EXPECT_EQ(a.energy.back().kinetic, b.energy.back().kinetic);
}

TEST(Run, ShearInvariantsAtEveryReport) {
  const auto g = slab(64, 10.0, 3.0);
  auto cfg = config(g, 0.01, 0.5, 0.02, 1.0);
  cfg.diag_every = 5;
  const auto tr = run(cfg, make_initial_data(InitKind::shear, 1.0, g));
  ASSERT_FALSE(tr.failed) << tr.failure;
  ASSERT_EQ(tr.states.size(), 11u);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    if (i > 0) EXPECT_GT(tr.states[i].t, tr.states[i - 1].t);
    EXPECT_LE(tr.diagnostics[i].divergence, cfg.div_tol);
    EXPECT_EQ(tr.diagnostics[i].wall_normal, 0.0);
    EXPECT_LE(tr.diagnostics[i].robin, cfg.bc_tol);
  }
}

TEST(Energy, ZeroFieldBalances) {
  const auto g = slab(24);
  const auto tr = run(config(g, 0.01, 0.5, 0.01, 0.03), VectorField(g));
  for (const auto& r : energy_balance(tr)) EXPECT_EQ(r.residual, 0.0);
  std::vector<EnergyRecord> two(2);
  EXPECT_THROW(energy_balance(two), InvalidArgument);
}

TEST(Energy, IdentityResidualSecondOrderBothSlipSigns) {
  const auto g = slab(48);
  const auto u0 = make_initial_data(InitKind::perturbed_shear, 1.0, g);
  for (double alpha : {-0.5, 0.5}) {
    std::vector<double> worst;
    for (double dt : {0.04, 0.02, 0.01}) {
      const auto tr = run(config(g, 0.01, alpha, dt, 0.4), u0);
      ASSERT_FALSE(tr.failed) << tr.failure;
      double m = 0.0;
      for (const auto& r : energy_balance(tr)) m = std::max(m, std::abs(r.residual));
      worst.push_back(m);
    }
    EXPECT_NEAR(worst[0] / worst[1], 4.0, 1.0) << "alpha " << alpha;
    EXPECT_NEAR(worst[1] / worst[2], 4.0, 1.0) << "alpha " << alpha;
  }
}

TEST(Energy, NonincreasingForNonnegativeSlip) {
  const auto g = slab(48);
  const auto tr = run(config(g, 0.01, 0.5, 0.01, 0.4), make_initial_data(InitKind::perturbed_shear, 1.0, g));
  ASSERT_FALSE(tr.failed);
  const double e0 = tr.energy.front().kinetic;
  for (std::size_t n = 1; n < tr.energy.size(); ++n)
    EXPECT_LE(tr.energy[n].kinetic, tr.energy[n - 1].kinetic + 1e-4 * 0.01 * 0.01 * e0);
}

}  // namespace
