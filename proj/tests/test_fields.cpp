#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "conslab/banded.hpp"
#include "conslab/error.hpp"
#include "conslab/field.hpp"
#include "conslab/grid.hpp"
#include "conslab/operators.hpp"
#include "conslab/spectral.hpp"
#include "util.hpp"

using namespace conslab;
namespace {

using namespace testutil;

TEST(Grid, UniformMapNodes) {
  const auto g = make_grid(1.0, 1.0, 8, 8, 5, 1.0, 0.0);
  const std::vector<double> want{0, 0.25, 0.5, 0.75, 1.0};
  ASSERT_EQ(g->z.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(g->z[k], want[k], 1e-15);
}

TEST(Grid, StretchedMapClosedForm) {
  const auto g = make_grid(1.0, 1.0, 8, 8, 3, 1.0, 2.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(g->z[0], 0.0, 1e-15);
  EXPECT_NEAR(g->z[1], (e - 1) / (e * e - 1), 1e-14);
  EXPECT_NEAR(g->z[1], 0.2689, 1e-4);
  EXPECT_NEAR(g->z[2], 1.0, 1e-15);
}

TEST(Grid, RejectsBadHorizontalSizes) {
  EXPECT_THROW(make_grid(1.0, 1.0, 4, 8, 16, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(make_grid(1.0, 1.0, 8, 9, 16, 1.0, 1.0), InvalidArgument);
}

TEST(Grid, NodesIncreasingAndClustered) {
  const auto g = slab(96);
  EXPECT_DOUBLE_EQ(g->z.front(), 0.0);
  EXPECT_NEAR(g->z.back(), g->Zmax, 1e-12);
  for (int k = 1; k < g->Nz; ++k) EXPECT_GT(g->z[k], g->z[k - 1]);
  EXPECT_LE(g->min_dz(), g->Zmax / (4.0 * g->Nz));
  double w = 0.0;
  for (double x : g->zweights) w += x;
  EXPECT_NEAR(w, g->Zmax, 1e-12);
}

TEST(Grid, FornbergWeightsReproduceMonomials) {
  const std::vector<double> nodes{0.0, 0.3, 0.7, 1.6};
  const auto w1 = fd_weights(0.3, nodes, 1);
  const auto w2 = fd_weights(0.3, nodes, 2);
  double d1 = 0, d2 = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    d1 += w1[i] * std::pow(nodes[i], 3);
    d2 += w2[i] * std::pow(nodes[i], 3);
  }
  EXPECT_NEAR(d1, 3 * 0.09, 1e-12);
  EXPECT_NEAR(d2, 6 * 0.3, 1e-12);
}

TEST(Spectral, RoundTripAndSingleMode) {
  const auto g = slab(8);
  const auto f = band_limited(g, 3);
  EXPECT_LT(max_abs_diff(to_physical(to_spectral(f)), f), 1e-13);
  const auto c = ScalarField::sample(g, [](double x1, double, double) { return std::cos(2 * x1); });
  const auto s = to_spectral(c);
  EXPECT_NEAR(std::abs(s.at(2, 0, 3) - cplx(0.5, 0.0)), 0.0, 1e-14);
  EXPECT_LT(s.hermitian_defect(), 1e-14);
}

TEST(Spectral, TruncationKeepsTwoThirdsBand) {
  const auto g = slab(4);
  EXPECT_TRUE(g->kept(5, 5));
  EXPECT_FALSE(g->kept(6, 0));
  EXPECT_FALSE(g->kept(0, 8));
  EXPECT_TRUE(g->kept(g->N1 - 5, 0));
}

TEST(Ddy, SingleModeToMachinePrecision) {
  const auto g = make_grid(3.0, 2.0, 16, 8, 6, 1.0, 1.0);
  const double k = 2 * kPi / g->L1;
  const auto f = ScalarField::sample(g, [&](double x1, double, double) { return std::sin(k * x1); });
  const auto want = ScalarField::sample(g, [&](double x1, double, double) { return k * std::cos(k * x1); });
  EXPECT_LT(max_abs_diff(ddy(f, 1), want), 1e-13);
  EXPECT_LT(linf_norm(ddy(f, 2)), 1e-13);
}

TEST(Ddy, ConstantGivesZero) {
  const auto g = slab(8);
  const ScalarField c(g, 4.2);
  EXPECT_LT(linf_norm(ddy(c, 1)), 1e-14);
  EXPECT_LT(linf_norm(ddy(c, 2)), 1e-14);
}

TEST(Ddy, MatchesCenteredDifferenceOracleAtItsOrder) {
  // Oracle: centered differences of the analytic field with shrinking h.
  const auto g = slab(6);
  auto fn = [](double x1, double x2, double z) {
    return std::cos(3 * x1 + x2 + 0.4) * std::exp(-z) + std::sin(-2 * x1 + 4 * x2) * z;
  };
  const auto f = ScalarField::sample(g, fn);
  const auto d = ddy(f, 1);
  double prev = 0.0;
  for (double h : {1e-2, 5e-3}) {
    const auto o = ScalarField::sample(g, [&](double x1, double x2, double z) {
      return (fn(x1 + h, x2, z) - fn(x1 - h, x2, z)) / (2 * h);
    });
    const double err = max_abs_diff(d, o);
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.05);
    prev = err;
  }
}

TEST(Ddy, ExactOnBandLimited) {
  const auto g = slab(10);
  const auto f = band_limited(g, 5);
  // d/dx1 through a second route: spectral multiplication by hand.
  auto s = to_spectral(f);
  for_each_mode(*g, [&](int j1, int j2, double xi1, double) {
    for (auto& v : s.column(j1, j2)) v *= cplx(0.0, g->is_nyquist(j1, j2) ? 0.0 : xi1);
  });
  const auto want = to_physical(s);
  EXPECT_LT(max_abs_diff(ddy(f, 1), want), 1e-12 * linf_norm(want));
}

TEST(Ddz, LinearExact) {
  const auto g = slab(24);
  const auto f = ScalarField::sample(g, [](double, double, double z) { return z; });
  const auto d = ddz(f);
  for (double v : d.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Ddz, QuadraticExactAndTwiceGivesTwo) {
  const auto g = slab(24);
  const auto f = ScalarField::sample(g, [](double, double, double z) { return z * z; });
  const auto d = ddz(f);
  const auto dd = ddz(d);
  for (int k = 1; k < g->Nz - 1; ++k) {
    EXPECT_NEAR(d.at(2, 3, k), 2 * g->z[k], 1e-11);
    EXPECT_NEAR(dd.at(2, 3, k), 2.0, 1e-10);
  }
}

TEST(Ddz, ExponentialSecondOrder) {
  std::vector<double> err;
  for (int nz : {32, 64, 128, 256}) {
    const auto g = make_grid(2 * kPi, 2 * kPi, 8, 8, nz, 10.0, 3.0);
    const auto f = ScalarField::sample(g, [](double, double, double z) { return std::exp(-z); });
    const auto want = ScalarField::sample(g, [](double, double, double z) { return -std::exp(-z); });
    err.push_back(max_abs_diff(ddz(f), want));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 2.0, 0.2);
}

TEST(Divergence, Examples) {
  const auto g = slab(16);
  const VectorField a(ScalarField::sample(g, [](double, double x2, double) { return std::sin(x2); }),
                      ScalarField::sample(g, [](double x1, double, double) { return std::cos(x1); }), ScalarField(g));
  EXPECT_LT(linf_norm(divergence(a)), 1e-13);
  const VectorField b{ScalarField(g), ScalarField(g), ScalarField::sample(g, [](double, double, double z) { return z; })};
  const auto db = divergence(b);
  for (double v : db.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Divergence, GradientOfHarmonicMatchesZeroLaplacianAtOrder) {
  // phi = cos(x1 + 2 x2) e^{-sqrt5 z} is harmonic, so div grad phi -> 0.
  std::vector<double> err;
  const double s5 = std::sqrt(5.0);
  for (int nz : {48, 96, 192}) {
    const auto g = slab(nz);
    const VectorField u(
        ScalarField::sample(g, [&](double x1, double x2, double z) { return -std::sin(x1 + 2 * x2) * std::exp(-s5 * z); }),
        ScalarField::sample(g, [&](double x1, double x2, double z) { return -2 * std::sin(x1 + 2 * x2) * std::exp(-s5 * z); }),
        ScalarField::sample(g, [&](double x1, double x2, double z) { return -s5 * std::cos(x1 + 2 * x2) * std::exp(-s5 * z); }));
    err.push_back(linf_norm(divergence(u)));
  }
  EXPECT_LT(err.back(), 1e-2);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.3);
}

TEST(Curl, ShearClosedForm) {
  const auto g = slab(64);
  auto U = [](double z) { return std::tanh(z) * std::exp(-z / 5); };
  auto dU = [](double z) {
    const double t = std::tanh(z);
    return ((1 - t * t) - t / 5) * std::exp(-z / 5);
  };
  const VectorField u(ScalarField::sample(g, [&](double, double, double z) { return U(z); }), ScalarField(g), ScalarField(g));
  const auto w = curl(u);
  EXPECT_LT(linf_norm(w[0]), 1e-14);
  EXPECT_LT(linf_norm(w[2]), 1e-14);
  const auto want = ScalarField::sample(g, [&](double, double, double z) { return dU(z); });
  EXPECT_LT(max_abs_diff(w[1], want), 5e-3);
}

TEST(Curl, OfGradientVanishesAtTruncationOrder) {
  std::vector<double> err;
  for (int nz : {48, 96, 192}) {
    const auto g = slab(nz);
    const auto phi = ScalarField::sample(g, [](double x1, double x2, double z) { return std::cos(x1 - x2) * z * std::exp(-z); });
    err.push_back(linf_norm(curl(gradient(phi))));
  }
  // The spectral and z-stencil derivatives commute, so the residual is roundoff.
  for (double e : err) EXPECT_LT(e, 1e-11);
}

TEST(Curl, WindowedRotationAgainstSymbolicOracle) {
  const auto g = slab(128);
  auto w = [](double z) { return z * z * std::exp(-z); };
  auto dw = [](double z) { return (2 * z - z * z) * std::exp(-z); };
  const VectorField u(ScalarField::sample(g, [&](double, double x2, double z) { return -std::sin(x2) * w(z); }),
                      ScalarField::sample(g, [&](double x1, double, double z) { return std::sin(x1) * w(z); }), ScalarField(g));
  const auto c = curl(u);
  const auto c1 = ScalarField::sample(g, [&](double x1, double, double z) { return -std::sin(x1) * dw(z); });
  const auto c2 = ScalarField::sample(g, [&](double, double x2, double z) { return -std::sin(x2) * dw(z); });
  const auto c3 = ScalarField::sample(g, [&](double x1, double x2, double z) { return (std::cos(x1) + std::cos(x2)) * w(z); });
  EXPECT_LT(max_abs_diff(c[0], c1), 2e-3);
  EXPECT_LT(max_abs_diff(c[1], c2), 2e-3);
  EXPECT_LT(max_abs_diff(c[2], c3), 1e-13);
}

TEST(DivergenceOfCurl, VanishesAtTruncationOrder) {
  std::vector<double> err;
  for (int nz : {48, 96, 192}) {
    const auto g = slab(nz);
    const VectorField u(ScalarField::sample(g, [](double x1, double x2, double z) { return std::cos(x2) * std::exp(-z) * z; }),
                        ScalarField::sample(g, [](double x1, double, double z) { return std::sin(2 * x1) * std::exp(-0.5 * z * z); }),
                        ScalarField::sample(g, [](double x1, double x2, double z) { return std::sin(x1 + x2) * z * z * std::exp(-z); }));
    err.push_back(linf_norm(divergence(curl(u))));
  }
  for (double e : err) EXPECT_LT(e, 1e-11);
}

TEST(Norms, ConstantAndZero) {
  const auto g = slab(20);
  const ScalarField c(g, -3.0);
  EXPECT_NEAR(l2_norm(c), 3.0 * std::sqrt(g->volume()), 1e-11);
  EXPECT_DOUBLE_EQ(linf_norm(c), 3.0);
  const ScalarField z(g);
  EXPECT_EQ(l2_norm(z), 0.0);
  EXPECT_EQ(linf_norm(z), 0.0);
}

TEST(Norms, ModeTimesExponentialAgainstFineQuadrature) {
  const auto g = slab(96);
  const auto f = ScalarField::sample(g, [&](double x1, double, double z) { return std::sin(2 * kPi * x1 / g->L1) * std::exp(-z); });
  // Independent oracle: the horizontal mean of sin^2 is 1/2; z-integral by
  // the trapezoid rule on a 10x finer uniform grid.
  const int n = 10 * g->Nz * 10;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = g->Zmax * i / n;
    s += (i == 0 || i == n ? 0.5 : 1.0) * std::exp(-2 * z);
  }
  s *= g->Zmax / n;
  const double want = std::sqrt(0.5 * g->area() * s);
  EXPECT_NEAR(l2_norm(f), want, 1e-3 * want);
}

TEST(Norms, ParallelogramLaw) {
  const auto g = slab(20);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto f = band_limited(g, seed), h = band_limited(g, seed + 100);
    const double lhs = std::pow(l2_norm(f + h), 2) + std::pow(l2_norm(f - h), 2);
    const double rhs = 2 * std::pow(l2_norm(f), 2) + 2 * std::pow(l2_norm(h), 2);
    EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
  }
}

TEST(Banded, MatchesDenseSolve) {
  const int n = 12, kl = 2, ku = 3;
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  BandedMatrix<double> A(n, kl, ku);
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
      const double v = U(rng) + (i == j ? 0.1 : 0.0);
      A(i, j) = v;
      D[i][j] = v;
    }
  std::vector<double> x(n), b(n, 0.0);
  for (int i = 0; i < n; ++i) x[i] = U(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b[i] += D[i][j] * x[j];
  const BandedLU<double> lu(A);
  lu.solve(std::span<double>(b));
  for (int i = 0; i < n; ++i) EXPECT_NEAR(b[i], x[i], 1e-10);
}

TEST(Banded, SingularThrows) {
  BandedMatrix<double> A(3, 1, 1);
  A(0, 0) = 1.0;
  A(2, 2) = 1.0;
  EXPECT_THROW(BandedLU<double>{A}, NumericalError);
}

}  // namespace
