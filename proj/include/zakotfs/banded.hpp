// banded.hpp - Banded storage for the masked FD channel matrix.
//
// Once the first and last b FD entries are forced to zero, only the
// diagonals |f - i| <= b of the modulo-banded channel matrix act on the
// transmitted vector, so the matrix is stored as (2b+1) diagonals and each
// mat-vec costs at most (2b+1) * n complex multiplies.

#pragma once

#include "zakotfs/channel_matrix.hpp"

namespace zakotfs {

class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(Eigen::Index n, int b)
      : n_(n), b_(b), bands_(Mat::Zero(2 * b + 1, n)) {
    if (b < 0 || n < 1) throw std::invalid_argument("BandedMatrix: invalid shape");
  }

  Eigen::Index size() const { return n_; }
  int half_bandwidth() const { return b_; }

  /// Entry (f, i); zero outside the band.
  cxd get(Eigen::Index f, Eigen::Index i) const {
    const Eigen::Index d = f - i;
    if (d < -b_ || d > b_) return 0.0;
    return bands_(d + b_, f);
  }

  void set(Eigen::Index f, Eigen::Index i, cxd v) {
    const Eigen::Index d = f - i;
    if (d < -b_ || d > b_) throw std::out_of_range("BandedMatrix::set: outside band");
    bands_(d + b_, f) = v;
  }

  /// y = H x.
  Vec multiply(const Vec& x) const {
    if (x.size() != n_) throw std::invalid_argument("BandedMatrix::multiply: length mismatch");
    Vec y = Vec::Zero(n_);
    for (int d = -b_; d <= b_; ++d) {
      const auto row = bands_.row(d + b_);
      const Eigen::Index f_lo = std::max<Eigen::Index>(0, d);
      const Eigen::Index f_hi = std::min<Eigen::Index>(n_ - 1, n_ - 1 + d);
      for (Eigen::Index f = f_lo; f <= f_hi; ++f) y[f] += row[f] * x[f - d];
    }
    return y;
  }

  /// y = H^H x.
  Vec multiply_adjoint(const Vec& x) const {
    if (x.size() != n_)
      throw std::invalid_argument("BandedMatrix::multiply_adjoint: length mismatch");
    Vec y = Vec::Zero(n_);
    for (int d = -b_; d <= b_; ++d) {
      const auto row = bands_.row(d + b_);
      const Eigen::Index f_lo = std::max<Eigen::Index>(0, d);
      const Eigen::Index f_hi = std::min<Eigen::Index>(n_ - 1, n_ - 1 + d);
      for (Eigen::Index f = f_lo; f <= f_hi; ++f) y[f - d] += std::conj(row[f]) * x[f];
    }
    return y;
  }

  Mat dense() const {
    Mat H = Mat::Zero(n_, n_);
    for (Eigen::Index f = 0; f < n_; ++f)
      for (Eigen::Index i = std::max<Eigen::Index>(0, f - b_);
           i <= std::min<Eigen::Index>(n_ - 1, f + b_); ++i)
        H(f, i) = get(f, i);
    return H;
  }

 private:
  Eigen::Index n_ = 0;
  int b_ = 0;
  Mat bands_;  // row d+b holds diagonal f - i = d, indexed by row f
};

/// Copy the diagonals |f - i| <= b out of a dense matrix, discarding the
/// folded corner entries (they only ever multiply the masked zeros).
inline BandedMatrix extract_band(const Mat& H, int b) {
  BandedMatrix out(H.rows(), b);
  for (Eigen::Index f = 0; f < H.rows(); ++f)
    for (Eigen::Index i = std::max<Eigen::Index>(0, f - b);
         i <= std::min<Eigen::Index>(H.cols() - 1, f + b); ++i)
      out.set(f, i, H(f, i));
  return out;
}

/// Band extraction straight from the structured operator; no dense matrix.
inline BandedMatrix extract_band(const FdChannelOperator& op, int b) {
  const Eigen::Index mn = op.grid().frame_size();
  BandedMatrix out(mn, b);
  const auto& offsets = op.doppler_offsets();
  for (int d = -b; d <= b; ++d) {
    const int l = floor_mod(d, static_cast<int>(mn));
    if (!std::binary_search(offsets.begin(), offsets.end(), l)) continue;
    for (Eigen::Index f = std::max<Eigen::Index>(0, d);
         f <= std::min<Eigen::Index>(mn - 1, mn - 1 + d); ++f)
      out.set(f, f - d, op.entry(static_cast<int>(f), static_cast<int>(f - d)));
  }
  return out;
}

}  // namespace zakotfs
