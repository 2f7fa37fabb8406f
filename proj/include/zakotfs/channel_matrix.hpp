// channel_matrix.hpp - Channel operators in the TD, DD and FD domains.
//
// The periodized taps h[kbar, lbar] act on an MN-periodic TD signal as
//
//   y[n] = sum_{kbar, lbar} h[kbar, lbar] x[n - kbar] e^{j 2 pi lbar (n - kbar) / MN}.
//
// Projecting onto an orthonormal basis produces the matrix I/O relation
// r = H s. For the DFT basis the matrix has the closed form
//
//   H[f, i] = sum_{kbar} h[kbar, (f - i) mod MN] e^{-j 2 pi f kbar / MN},
//
// which is modulo-banded: H[f, i] is nonzero only when (f - i) mod MN lies
// in the Doppler support of h, so the band folds into the matrix corners.
// FdChannelOperator stores one column vector per Doppler offset and applies
// the matrix in O(|support| * MN) without materializing it.

#pragma once

#include "zakotfs/channel.hpp"
#include "zakotfs/zak.hpp"

namespace zakotfs {

enum class Domain { DD, FD, TD };

/// Dense MN x MN channel matrix tagged with the domain it acts in.
struct ChannelMatrix {
  GridParams grid;
  Domain domain = Domain::FD;
  Mat H;
};

/// Dense TD operator C with y = C x for MN-periodic x.
inline ChannelMatrix td_channel_operator(const PeriodizedChannel& ch, int dense_cap = kDenseCap) {
  const int mn = ch.grid.frame_size();
  if (mn > dense_cap) throw std::invalid_argument("td_channel_operator: grid exceeds dense cap");
  Mat C = Mat::Zero(mn, mn);
  for (const auto& t : ch.taps) {
    for (int n = 0; n < mn; ++n) {
      const int m = floor_mod(n - t.k, mn);
      C(n, m) += t.h * cis(2.0 * kPi * static_cast<double>(t.l) * (n - t.k) / mn);
    }
  }
  return {ch.grid, Domain::TD, std::move(C)};
}

/// Apply the TD operator to one period of an MN-periodic signal.
inline Vec td_channel_apply(const PeriodizedChannel& ch, const Vec& x) {
  const int mn = ch.grid.frame_size();
  if (x.size() != mn) throw std::invalid_argument("td_channel_apply: length mismatch");
  Vec y = Vec::Zero(mn);
  for (const auto& t : ch.taps)
    for (int n = 0; n < mn; ++n)
      y[n] += t.h * x[floor_mod(n - t.k, mn)] *
              cis(2.0 * kPi * static_cast<double>(t.l) * (n - t.k) / mn);
  return y;
}

/**
 * The FD channel matrix in structured form: for each Doppler offset lbar in
 * the support, gain[j][f] = sum_kbar h[kbar, lbar_j] e^{-j 2 pi f kbar / MN}
 * so that H[f, i] = gain[j][f] whenever (f - i) mod MN == lbar_j.
 */
class FdChannelOperator {
 public:
  FdChannelOperator() = default;

  explicit FdChannelOperator(const PeriodizedChannel& ch) : grid_(ch.grid) {
    const int mn = grid_.frame_size();
    offsets_ = ch.doppler_support();
    gains_.assign(offsets_.size(), Vec::Zero(mn));
    for (const auto& t : ch.taps) {
      const size_t j = std::lower_bound(offsets_.begin(), offsets_.end(), t.l) - offsets_.begin();
      for (int f = 0; f < mn; ++f)
        gains_[j][f] += t.h * cis(-2.0 * kPi * static_cast<double>(f) * t.k / mn);
    }
  }

  const GridParams& grid() const { return grid_; }
  const std::vector<int>& doppler_offsets() const { return offsets_; }

  /// y = H s, exact over the full modulo-banded support.
  Vec apply(const Vec& s) const {
    const int mn = grid_.frame_size();
    if (s.size() != mn) throw std::invalid_argument("FdChannelOperator::apply: length mismatch");
    Vec y = Vec::Zero(mn);
    for (size_t j = 0; j < offsets_.size(); ++j) {
      const int l = offsets_[j];
      const Vec& g = gains_[j];
      for (int f = 0; f < mn; ++f) y[f] += g[f] * s[floor_mod(f - l, mn)];
    }
    return y;
  }

  /// y = H^H s.
  Vec apply_adjoint(const Vec& s) const {
    const int mn = grid_.frame_size();
    if (s.size() != mn)
      throw std::invalid_argument("FdChannelOperator::apply_adjoint: length mismatch");
    Vec y = Vec::Zero(mn);
    for (size_t j = 0; j < offsets_.size(); ++j) {
      const int l = offsets_[j];
      const Vec& g = gains_[j];
      for (int f = 0; f < mn; ++f) y[floor_mod(f - l, mn)] += std::conj(g[f]) * s[f];
    }
    return y;
  }

  /// Entry H[f, i].
  cxd entry(int f, int i) const {
    const int mn = grid_.frame_size();
    const int d = floor_mod(f - i, mn);
    const auto it = std::lower_bound(offsets_.begin(), offsets_.end(), d);
    if (it == offsets_.end() || *it != d) return 0.0;
    return gains_[it - offsets_.begin()][f];
  }

  /// Diagonal of H^H H, i.e. column energies, in O(|support| * MN).
  RealVec column_energies() const {
    const int mn = grid_.frame_size();
    RealVec e = RealVec::Zero(mn);
    for (size_t j = 0; j < offsets_.size(); ++j) {
      const int l = offsets_[j];
      for (int i = 0; i < mn; ++i) e[i] += std::norm(gains_[j][floor_mod(i + l, mn)]);
    }
    return e;
  }

  Mat dense(int dense_cap = kDenseCap) const {
    const int mn = grid_.frame_size();
    if (mn > dense_cap) throw std::invalid_argument("FdChannelOperator::dense: grid exceeds cap");
    Mat H = Mat::Zero(mn, mn);
    for (size_t j = 0; j < offsets_.size(); ++j) {
      const int l = offsets_[j];
      for (int f = 0; f < mn; ++f) H(f, floor_mod(f - l, mn)) = gains_[j][f];
    }
    return H;
  }

 private:
  GridParams grid_;
  std::vector<int> offsets_;  // sorted Doppler indices in [0, MN)
  std::vector<Vec> gains_;    // one length-MN column per offset
};

enum class BasisKind { Pulsone, Dft };

/// Orthonormal basis signals as matrix columns: column i is phi_i[n].
inline Mat basis_matrix(const GridParams& grid, BasisKind kind) {
  const int mn = grid.frame_size();
  Mat Phi(mn, mn);
  if (kind == BasisKind::Pulsone) {
    for (int i = 0; i < mn; ++i) {
      const int k0 = i % grid.M;
      const int l0 = i / grid.M;
      Phi.col(i) = pulsone(grid, k0, l0).x;
    }
  } else {
    const double amp = 1.0 / std::sqrt(static_cast<double>(mn));
    for (int i = 0; i < mn; ++i)
      for (int n = 0; n < mn; ++n)
        Phi(n, i) = amp * cis(2.0 * kPi * static_cast<double>(i) * n / mn);
  }
  return Phi;
}

/**
 * Projection-route channel matrix H[f, i] = phi_f^H C phi_i. O(MN^3);
 * verification oracle for small grids. Pulsone basis yields the DD matrix,
 * DFT basis the FD matrix.
 */
inline ChannelMatrix build_H_basis(const PeriodizedChannel& ch, BasisKind basis,
                                   int dense_cap = kDenseCap) {
  const int mn = ch.grid.frame_size();
  if (mn > dense_cap) throw std::invalid_argument("build_H_basis: grid exceeds dense cap");
  const Mat C = td_channel_operator(ch, dense_cap).H;
  const Mat Phi = basis_matrix(ch.grid, basis);
  Mat H = Phi.adjoint() * C * Phi;
  return {ch.grid, basis == BasisKind::Pulsone ? Domain::DD : Domain::FD, std::move(H)};
}

/// Closed-form FD channel matrix (dense); see FdChannelOperator for the fast path.
inline ChannelMatrix build_H_fd(const PeriodizedChannel& ch, int dense_cap = kDenseCap) {
  return {ch.grid, Domain::FD, FdChannelOperator(ch).dense(dense_cap)};
}

/**
 * DD channel matrix built operationally as R^H H R using the structured FD
 * operator and the IDFZT transforms; avoids the O(MN^3) projection route.
 */
inline ChannelMatrix build_H_dd(const PeriodizedChannel& ch, int dense_cap = kDenseCap) {
  const int mn = ch.grid.frame_size();
  if (mn > dense_cap) throw std::invalid_argument("build_H_dd: grid exceeds dense cap");
  const FdChannelOperator op(ch);
  Mat H(mn, mn);
  DDFrame unit(ch.grid);
  for (int i = 0; i < mn; ++i) {
    unit.X(i % ch.grid.M, i / ch.grid.M) = 1.0;
    const Vec s = idfzt(unit).s;
    H.col(i) = dfzt(FDVector(ch.grid, op.apply(s))).vec();
    unit.X(i % ch.grid.M, i / ch.grid.M) = 0.0;
  }
  return {ch.grid, Domain::DD, std::move(H)};
}

/// Apply the DD-domain channel to a flattened DD vector via R^H H R.
inline Vec dd_channel_apply(const FdChannelOperator& op, const Vec& x_dd) {
  const DDFrame frame = DDFrame::from_vec(op.grid(), x_dd);
  const Vec s = idfzt(frame).s;
  return dfzt(FDVector(op.grid(), op.apply(s))).vec();
}

/**
 * Smallest half-bandwidth b such that every entry of H whose modulo offset
 * (f - i) mod MN falls outside [0, b] u [MN-b, MN-1] is below
 * threshold * max|H|.
 */
inline int doppler_band_width(const PeriodizedChannel& ch, double threshold) {
  const FdChannelOperator op(ch);
  const int mn = ch.grid.frame_size();
  double peak = 0;
  std::vector<std::pair<int, double>> offset_peak;
  for (size_t j = 0; j < op.doppler_offsets().size(); ++j) {
    double m = 0;
    for (int f = 0; f < mn; ++f)
      m = std::max(m, std::abs(op.entry(f, floor_mod(f - op.doppler_offsets()[j], mn))));
    offset_peak.emplace_back(op.doppler_offsets()[j], m);
    peak = std::max(peak, m);
  }
  int b = 0;
  for (const auto& [l, m] : offset_peak)
    if (m >= threshold * peak) b = std::max(b, std::min(l, mn - l));
  return b;
}

/// Band-width presets from the reported pulse-shape settings.
inline int band_preset(PulseKind kind, double nu_max_hz, const GridParams& grid) {
  const double nt = nu_max_hz * grid.duration();
  switch (kind) {
    case PulseKind::Rrc:
    case PulseKind::Gauss:
      return static_cast<int>(std::ceil(nt)) + 1;
    case PulseKind::GaussSinc:
      return static_cast<int>(std::ceil(5.0 * nt));
    case PulseKind::Sinc:
      return grid.N + 1;
  }
  throw std::invalid_argument("band_preset: unsupported pulse kind");
}

}  // namespace zakotfs
