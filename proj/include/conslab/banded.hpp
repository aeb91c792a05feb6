#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "conslab/error.hpp"

namespace conslab {

/// Square band matrix with kl sub- and ku super-diagonals, stored with kl
/// extra super-diagonals of room for pivoting fill-in.
template <class T>
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), w_(2 * kl + ku + 1), a_(std::size_t(n) * w_) {}

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  T& operator()(int i, int j) { return a_[std::size_t(i) * w_ + (j - i + kl_)]; }
  T operator()(int i, int j) const { return a_[std::size_t(i) * w_ + (j - i + kl_)]; }
  bool in_band(int i, int j) const { return j - i >= -kl_ && j - i <= ku_ + kl_; }

  void set_zero() { std::fill(a_.begin(), a_.end(), T{}); }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0, w_ = 0;
  std::vector<T> a_;
};

/// LU factorization with partial pivoting of a band matrix (LINPACK gbfa/gbsl layout).
template <class T>
class BandedLU {
 public:
  BandedLU() = default;
  explicit BandedLU(BandedMatrix<T> m) : m_(std::move(m)), piv_(m_.n()) { factor(); }

  bool empty() const { return m_.n() == 0; }

  template <class V>
  void solve(std::span<V> b) const {
    const int n = m_.n(), kl = m_.kl(), ku = m_.ku();
    for (int k = 0; k < n; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      const int last = std::min(n - 1, k + kl);
      for (int i = k + 1; i <= last; ++i) b[i] -= m_(i, k) * b[k];
    }
    for (int i = n - 1; i >= 0; --i) {
      V s = b[i];
      const int last = std::min(n - 1, i + ku + kl);
      for (int j = i + 1; j <= last; ++j) s -= m_(i, j) * b[j];
      b[i] = s / m_(i, i);
    }
  }

 private:
  void factor() {
    const int n = m_.n(), kl = m_.kl(), ku = m_.ku();
    for (int k = 0; k < n; ++k) {
      const int last_row = std::min(n - 1, k + kl);
      const int last_col = std::min(n - 1, k + ku + kl);
      int p = k;
      double best = std::abs(m_(k, k));
      for (int i = k + 1; i <= last_row; ++i)
        if (std::abs(m_(i, k)) > best) {
          best = std::abs(m_(i, k));
          p = i;
        }
      if (!(best > 0.0)) throw NumericalError("BandedLU: singular matrix");
      piv_[k] = p;
      if (p != k)
        for (int j = k; j <= last_col; ++j) std::swap(m_(k, j), m_(p, j));
      const T pivot = m_(k, k);
      for (int i = k + 1; i <= last_row; ++i) {
        const T l = m_(i, k) / pivot;
        m_(i, k) = l;
        if (l == T{}) continue;
        for (int j = k + 1; j <= last_col; ++j) m_(i, j) -= l * m_(k, j);
      }
    }
  }

  BandedMatrix<T> m_;
  std::vector<int> piv_;
};

}  // namespace conslab
