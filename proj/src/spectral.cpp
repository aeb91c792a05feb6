#include "conslab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

#include "conslab/error.hpp"
#include "conslab/field.hpp"

namespace conslab {

namespace {

fftw_plan plan_r2c(int n1, int n2, int howmany) {
  const int dims[2] = {n1, n2};
  const int nky = n2 / 2 + 1;
  std::vector<double> in(static_cast<std::size_t>(n1) * n2 * howmany);
  std::vector<cplx> out(static_cast<std::size_t>(n1) * nky * howmany);
  fftw_plan p = fftw_plan_many_dft_r2c(2, dims, howmany, in.data(), nullptr, howmany, 1,
                                       reinterpret_cast<fftw_complex*>(out.data()), nullptr,
                                       howmany, 1, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw NumericalError("FFTW r2c planning failed");
  return p;
}

fftw_plan plan_c2r(int n1, int n2, int howmany) {
  const int dims[2] = {n1, n2};
  const int nky = n2 / 2 + 1;
  std::vector<double> out(static_cast<std::size_t>(n1) * n2 * howmany);
  std::vector<cplx> in(static_cast<std::size_t>(n1) * nky * howmany);
  fftw_plan p = fftw_plan_many_dft_c2r(2, dims, howmany, reinterpret_cast<fftw_complex*>(in.data()),
                                       nullptr, howmany, 1, out.data(), nullptr, howmany, 1,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw NumericalError("FFTW c2r planning failed");
  return p;
}

}  // namespace

Transform::Transform(int N1, int N2, int Nz) : n1_(N1), n2_(N2), nz_(Nz) {
  fwd_ = plan_r2c(N1, N2, Nz);
  inv_ = plan_c2r(N1, N2, Nz);
  fwd_plane_ = plan_r2c(N1, N2, 1);
  inv_plane_ = plan_c2r(N1, N2, 1);
  scratch_.resize(static_cast<std::size_t>(N1) * (N2 / 2 + 1) * Nz);
  scratch_plane_.resize(static_cast<std::size_t>(N1) * (N2 / 2 + 1));
}

Transform::~Transform() {
  for (void* p : {fwd_, inv_, fwd_plane_, inv_plane_})
    if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

void Transform::forward(std::span<const double> in, std::span<cplx> out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / (static_cast<double>(n1_) * n2_);
  for (auto& v : out) v *= scale;
}

void Transform::inverse(std::span<const cplx> in, std::span<double> out) const {
  std::copy(in.begin(), in.end(), scratch_.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), reinterpret_cast<fftw_complex*>(scratch_.data()),
                       out.data());
}

void Transform::forward_plane(std::span<const double> in, std::span<cplx> out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_plane_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / (static_cast<double>(n1_) * n2_);
  for (auto& v : out) v *= scale;
}

void Transform::inverse_plane(std::span<const cplx> in, std::span<double> out) const {
  std::copy(in.begin(), in.end(), scratch_plane_.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_plane_),
                       reinterpret_cast<fftw_complex*>(scratch_plane_.data()), out.data());
}

SpectralField::SpectralField(GridPtr grid) : grid_(std::move(grid)), data_(grid_->spectral_size()) {}

std::span<cplx> SpectralField::column(int j1, int j2) {
  return {data_.data() + index(j1, j2, 0), static_cast<std::size_t>(grid_->Nz)};
}

std::span<const cplx> SpectralField::column(int j1, int j2) const {
  return {data_.data() + index(j1, j2, 0), static_cast<std::size_t>(grid_->Nz)};
}

void SpectralField::truncate() {
  const Grid& g = *grid_;
  for (int j1 = 0; j1 < g.N1; ++j1)
    for (int j2 = 0; j2 < g.nky(); ++j2)
      if (!g.kept(j1, j2))
        for (auto& v : column(j1, j2)) v = 0.0;
}

double SpectralField::hermitian_defect() const {
  const Grid& g = *grid_;
  double d = 0.0;
  for (int j2 : {0, g.N2 / 2}) {
    for (int j1 = 0; j1 < g.N1; ++j1) {
      const int m1 = (g.N1 - j1) % g.N1;
      for (int k = 0; k < g.Nz; ++k)
        d = std::max(d, std::abs(at(j1, j2, k) - std::conj(at(m1, j2, k))));
    }
  }
  return d;
}

SpectralField to_spectral(const ScalarField& f) {
  SpectralField s(f.grid());
  f.g().fft().forward(f.values(), s.data());
  return s;
}

ScalarField to_physical(const SpectralField& s) {
  ScalarField f(s.grid());
  s.grid()->fft().inverse(s.data(), f.values());
  return f;
}

}  // namespace conslab
