#pragma once

#include <complex>
#include <span>
#include <vector>

#include "conslab/grid.hpp"

namespace conslab {

using cplx = std::complex<double>;

/// Batched 2-D real-to-complex transform over the horizontal plane of every
/// z-level. Coefficients are normalized (divided by N1*N2) so that
/// f(x) = sum_xi fhat(xi) e^{i xi.x}. Spectral layout: (j1*nky + j2)*Nz + k.
class Transform {
 public:
  Transform(int N1, int N2, int Nz);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  void forward(std::span<const double> in, std::span<cplx> out) const;
  /// The input is left untouched (an internal copy is destroyed by FFTW).
  void inverse(std::span<const cplx> in, std::span<double> out) const;

  /// Single horizontal plane (Nz = 1) transforms for boundary traces.
  void forward_plane(std::span<const double> in, std::span<cplx> out) const;
  void inverse_plane(std::span<const cplx> in, std::span<double> out) const;

 private:
  int n1_, n2_, nz_;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
  void* fwd_plane_ = nullptr;
  void* inv_plane_ = nullptr;
  mutable std::vector<cplx> scratch_;
  mutable std::vector<cplx> scratch_plane_;
};

class ScalarField;

/// Horizontal Fourier coefficients of a real field at every z-level.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  cplx& at(int j1, int j2, int k) { return data_[index(j1, j2, k)]; }
  const cplx& at(int j1, int j2, int k) const { return data_[index(j1, j2, k)]; }
  /// Contiguous z-column of one horizontal mode.
  std::span<cplx> column(int j1, int j2);
  std::span<const cplx> column(int j1, int j2) const;

  std::size_t index(int j1, int j2, int k) const {
    return (static_cast<std::size_t>(j1) * grid_->nky() + j2) * grid_->Nz + k;
  }

  /// Zeroes every mode outside the 2/3-rule band.
  void truncate();

  /// Largest deviation from Hermitian symmetry on the self-conjugate
  /// j2 = 0 (and j2 = N2/2) planes.
  double hermitian_defect() const;

 private:
  GridPtr grid_;
  std::vector<cplx> data_;
};

SpectralField to_spectral(const ScalarField& f);
ScalarField to_physical(const SpectralField& s);

/// Parseval weight of half-spectrum column j2 (1 on self-conjugate planes, 2 otherwise).
inline double parseval_weight(const Grid& g, int j2) {
  return (j2 == 0 || 2 * j2 == g.N2) ? 1.0 : 2.0;
}

/// Calls fn(j1, j2, xi1, xi2) for every stored horizontal mode.
template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  for (int j1 = 0; j1 < g.N1; ++j1)
    for (int j2 = 0; j2 < g.nky(); ++j2) fn(j1, j2, g.xi1(j1), g.xi2(j2));
}

}  // namespace conslab
