// zak.hpp - Transforms between the DD, FD and TD signal representations.
//
// The DD frame X[k0, l0] reaches the time domain through the pulsone basis
// (a pulse train at delay k0 modulated by a Doppler tone l0), and reaches
// the frequency domain through the inverse discrete frequency Zak transform
// (IDFZT):
//
//   s[i] = (1/sqrt(M)) * sum_{k0} X[k0, i mod N] * e^{-j 2 pi i k0 / MN}.
//
// The IDFZT is a unitary map; its matrix form factors as
// R = K (I_N kron F_M) diag(q) with K the stride permutation, F_M the
// unitary M-point DFT and q_l[k] = e^{-j 2 pi l k / MN}. All DFT-like maps
// here use unitary 1/sqrt scaling so these factorizations hold exactly.

#pragma once

#include "zakotfs/types.hpp"

namespace zakotfs {

/// Unitary DFT of a vector: sign = -1 forward, +1 inverse. Direct O(n^2).
inline Vec unitary_dft(const Vec& v, int sign) {
  const Eigen::Index n = v.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Vec out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    cxd acc = 0.0;
    for (Eigen::Index m = 0; m < n; ++m)
      acc += v[m] * cis(sign * 2.0 * kPi * static_cast<double>(k) * static_cast<double>(m) / n);
    out[k] = scale * acc;
  }
  return out;
}

/**
 * Time-domain pulsone for DD bin (k0, l0): one period of
 * p[n] = (1/sqrt(N)) * e^{j 2 pi d l0 / N} at n = k0 + d*M, d = 0..N-1,
 * zero elsewhere. Unit energy; the MN pulsones are orthonormal.
 */
inline TDSignal pulsone(const GridParams& grid, int k0, int l0) {
  if (k0 < 0 || k0 >= grid.M) throw std::out_of_range("pulsone: delay index out of range");
  if (l0 < 0 || l0 >= grid.N) throw std::out_of_range("pulsone: Doppler index out of range");
  TDSignal p(grid);
  const double amp = 1.0 / std::sqrt(static_cast<double>(grid.N));
  for (int d = 0; d < grid.N; ++d)
    p.x[k0 + d * grid.M] = amp * cis(2.0 * kPi * d * l0 / grid.N);
  return p;
}

/// Modulate a DD frame onto the pulsone basis: x[n] = sum X[k0,l0] p_{(k0,l0)}[n].
inline TDSignal dd_to_td(const DDFrame& frame) {
  const auto& g = frame.grid;
  TDSignal out(g);
  const double amp = 1.0 / std::sqrt(static_cast<double>(g.N));
  // Samples n = k0 + d*M collect an N-point inverse DFT of row k0.
  for (int k0 = 0; k0 < g.M; ++k0) {
    for (int d = 0; d < g.N; ++d) {
      cxd acc = 0.0;
      for (int l0 = 0; l0 < g.N; ++l0)
        acc += frame.X(k0, l0) * cis(2.0 * kPi * d * l0 / g.N);
      out.x[k0 + d * g.M] = amp * acc;
    }
  }
  return out;
}

/// Inverse discrete frequency Zak transform of a DD frame.
inline FDVector idfzt(const DDFrame& frame) {
  const auto& g = frame.grid;
  const int mn = g.frame_size();
  FDVector out(g);
  const double amp = 1.0 / std::sqrt(static_cast<double>(g.M));
  for (int i = 0; i < mn; ++i) {
    const int l0 = i % g.N;
    cxd acc = 0.0;
    for (int k0 = 0; k0 < g.M; ++k0)
      acc += frame.X(k0, l0) * cis(-2.0 * kPi * static_cast<double>(i) * k0 / mn);
    out.s[i] = amp * acc;
  }
  return out;
}

/// DFZT: exact inverse (= adjoint) of idfzt.
inline DDFrame dfzt(const FDVector& fd) {
  const auto& g = fd.grid;
  const int mn = g.frame_size();
  DDFrame out(g);
  const double amp = 1.0 / std::sqrt(static_cast<double>(g.M));
  // X[k0, l0] = (1/sqrt(M)) * sum_m s[l0 + m*N] * e^{+j 2 pi (l0 + m N) k0 / MN}
  for (int l0 = 0; l0 < g.N; ++l0) {
    for (int k0 = 0; k0 < g.M; ++k0) {
      cxd acc = 0.0;
      for (int m = 0; m < g.M; ++m) {
        const int i = l0 + m * g.N;
        acc += fd.s[i] * cis(2.0 * kPi * static_cast<double>(i) * k0 / mn);
      }
      out.X(k0, l0) = amp * acc;
    }
  }
  return out;
}

/**
 * Dense IDFZT matrix R with s = R * vec(X) (delay-fastest flattening).
 * Assembled from the K (I kron F_M) diag(q) factorization; unitary.
 * Refuses grids above the dense cap.
 */
inline Mat build_R(const GridParams& grid, int dense_cap = kDenseCap) {
  const int mn = grid.frame_size();
  if (mn > dense_cap) throw std::invalid_argument("build_R: grid exceeds dense cap");
  Mat R(mn, mn);
  const double amp = 1.0 / std::sqrt(static_cast<double>(grid.M));
  // Row i = l + m*N (l = i mod N), column k0 + l*M: e^{-j 2 pi i k0 / MN}/sqrt(M).
  for (int i = 0; i < mn; ++i) {
    R.row(i).setZero();
    const int l = i % grid.N;
    for (int k0 = 0; k0 < grid.M; ++k0)
      R(i, k0 + l * grid.M) = amp * cis(-2.0 * kPi * static_cast<double>(i) * k0 / mn);
  }
  return R;
}

/// Synthesize the TD signal from FD carriers: unitary inverse DFT of length MN.
inline TDSignal td_from_fd(const FDVector& fd) {
  return TDSignal(fd.grid, unitary_dft(fd.s, +1));
}

/// Analyze a TD signal into FD carriers: unitary forward DFT of length MN.
inline FDVector fd_from_td(const TDSignal& td) {
  return FDVector(td.grid, unitary_dft(td.x, -1));
}

}  // namespace zakotfs
