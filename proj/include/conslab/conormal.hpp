#pragma once

#include <string>
#include <vector>

#include "conslab/field.hpp"

namespace conslab {

/// Boundary-degenerate weight phi(z) = z / (1 + z) of the normal conormal field Z3 = phi d_z.
struct ConormalWeight {
  static double phi(double z) { return z / (1.0 + z); }
  static double dphi(double z) { return 1.0 / ((1.0 + z) * (1.0 + z)); }
  static double d2phi(double z) { return -2.0 / ((1.0 + z) * (1.0 + z) * (1.0 + z)); }
};

inline constexpr int kDefaultMaxOrder = 4;

/// Z^alpha = Z1^a1 Z2^a2 Z3^a3.
struct MultiIndex {
  int a1 = 0, a2 = 0, a3 = 0;
  int order() const { return a1 + a2 + a3; }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Every multi-index with |alpha| <= m, ordered by total order then lexicographically.
std::vector<MultiIndex> multi_indices(int m);

/// Z1 = d_1, Z2 = d_2 (spectral), Z3 = phi(z) d_z (finite differences).
ScalarField apply_Z(const ScalarField& f, int i);
/// Z3 is applied first, then Z2, then Z1; the discrete fields commute exactly,
/// so the order only fixes rounding.
ScalarField apply_Z_multi(const ScalarField& f, const MultiIndex& alpha, int m_max = kDefaultMaxOrder);

/// Canonical-order conormal norm (sum over |alpha| <= m of squared L2 norms).
double conormal_norm(const ScalarField& f, int m);
double conormal_norm(const VectorField& u, int m);
/// Squared conormal norms for every order 0..m at once.
std::vector<double> conormal_norms_sq(const ScalarField& f, int m);

/// Sum over |alpha| <= k of grid maxima of Z^alpha u (componentwise maxima for vectors).
double conormal_sup(const ScalarField& f, int k);
double conormal_sup(const VectorField& u, int k);

/// N_m = |u|_m^2 + |grad u|_{m-1}^2 + |grad u|_{1,inf}^2.
double N_m(const VectorField& u, int m);

struct ConormalReport {
  double t = 0.0;
  int m = 0;
  std::vector<double> norm_m;     ///< |u|_k, k = 0..m
  std::vector<double> grad_norm;  ///< |grad u|_k, k = 0..m-1
  double sup_k[2] = {0, 0};       ///< |u|_{j,inf}, j = 0, 1
  double grad_sup[2] = {0, 0};    ///< |grad u|_{j,inf}, j = 0, 1
  double N_m = 0.0;
  double eta_boundary_max = 0.0;
};

ConormalReport conormal_report(const VectorField& u, int m, double t, double alpha);
std::string conormal_csv_header(int m);
std::string to_csv_row(const ConormalReport& r);

/// Max-norm residuals of the discrete identities
///   [Z3, Lap] f = -2 phi' d_zz f - phi'' d_z f
///   [Z3, div] u = -phi' d_z u3      (with u = (f, f, f))
/// over the rows 1..Nz-2.
struct CommutatorResidual {
  double laplace = 0.0;
  double divergence = 0.0;
};
CommutatorResidual check_commutator_identities(const ScalarField& f);

/// Both sides of |f|_inf^2 <= C (|d_z f|_{m0} |f|_{m0} + |f|_{m0}^2).
struct EmbeddingSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
EmbeddingSides embedding_check(const ScalarField& f, int m0);

}  // namespace conslab
