// equalizer.hpp - Null-space masking, LMMSE equalization and detection.
//
// Masking: symbols are mounted on the null space of R', the matrix formed
// by the first b and last b rows of the IDFZT matrix R. The transmitted FD
// vector s' = R N x' then has zero first/last b entries, which reduces the
// modulo-banded channel matrix to a true banded one.
//
// Equalization: the LMMSE output solves (H^H H + R_n) s = H^H r' (for
// R_n = sigma^2 I this is algebraically identical to the textbook
// (I + H^H R_n^-1 H)^-1 H^H R_n^-1 r' form). The conjugate gradient method
// solves the system with banded mat-vecs at O(b MN) per iteration; a dense
// solve serves as the O(M^3 N^3) oracle.

#pragma once

#include "zakotfs/banded.hpp"
#include "zakotfs/rng.hpp"

#include <fstream>

namespace zakotfs {

/// AWGN with covariance sigma^2 I; variance is per complex dimension.
struct NoiseModel {
  double variance = 0.0;
};

/**
 * Orthonormal basis of null(R'), R' = [first b rows of R; last b rows of R].
 * Columns span the (MN - 2b)-dimensional symbol subspace.
 */
struct NullSpaceMask {
  GridParams grid;
  int b = 0;
  Mat Nmat;  // MN x (MN - 2b)
};

/**
 * Null basis via Householder QR of R'^H: with R'^H = Q T (T upper
 * triangular, top 2b x 2b block nonsingular), columns 2b.. of Q span
 * null(R'). Each column is normalized so its largest-magnitude leading
 * entry is real-positive, which pins the basis deterministically.
 */
inline NullSpaceMask build_mask(const GridParams& grid, const Mat& R, int b) {
  const int mn = grid.frame_size();
  if (R.rows() != mn || R.cols() != mn)
    throw std::invalid_argument("build_mask: R must be MN x MN");
  if (b < 0 || 2 * b >= mn) throw std::invalid_argument("build_mask: need 0 <= 2b < MN");

  NullSpaceMask mask;
  mask.grid = grid;
  mask.b = b;
  if (b == 0) {
    mask.Nmat = Mat::Identity(mn, mn);
    return mask;
  }

  Mat Rp(2 * b, mn);
  Rp.topRows(b) = R.topRows(b);
  Rp.bottomRows(b) = R.bottomRows(b);

  Eigen::HouseholderQR<Mat> qr(Rp.adjoint());
  const Mat Q = qr.householderQ();
  Mat Nmat = Q.rightCols(mn - 2 * b);

  for (Eigen::Index c = 0; c < Nmat.cols(); ++c) {
    Eigen::Index lead = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < Nmat.rows(); ++r) {
      const double m = std::abs(Nmat(r, c));
      if (m > best + 1e-15) {
        best = m;
        lead = r;
      }
    }
    if (best > 0) Nmat.col(c) *= std::conj(Nmat(lead, c)) / std::abs(Nmat(lead, c));
  }
  mask.Nmat = std::move(Nmat);
  return mask;
}

/// s' = R N x'; the first and last b entries of s' are zero by construction.
inline Vec mask_encode(const Vec& x_prime, const Mat& R, const NullSpaceMask& mask) {
  if (x_prime.size() != mask.Nmat.cols())
    throw std::invalid_argument("mask_encode: symbol vector must have MN - 2b entries");
  return R * (mask.Nmat * x_prime);
}

/// Project an equalized FD vector back onto the masked symbols: N^H R^H s.
inline Vec mask_decode(const Vec& s, const NullSpaceMask& mask) {
  const DDFrame dd = dfzt(FDVector(mask.grid, s));
  return mask.Nmat.adjoint() * dd.vec();
}

/// r = H s + w, w ~ CN(0, sigma^2 I). Overloads for each operator form.
inline Vec apply_channel(const Mat& H, const Vec& s, const NoiseModel& noise, RngStream& rng) {
  Vec r = H * s;
  if (noise.variance > 0) r += rng.cnormal_vec(r.size(), noise.variance);
  return r;
}

inline Vec apply_channel(const BandedMatrix& H, const Vec& s, const NoiseModel& noise,
                         RngStream& rng) {
  Vec r = H.multiply(s);
  if (noise.variance > 0) r += rng.cnormal_vec(r.size(), noise.variance);
  return r;
}

inline Vec apply_channel(const FdChannelOperator& H, const Vec& s, const NoiseModel& noise,
                         RngStream& rng) {
  Vec r = H.apply(s);
  if (noise.variance > 0) r += rng.cnormal_vec(r.size(), noise.variance);
  return r;
}

/**
 * Dense LMMSE solve: (sigma^2 I + H^H H)^-1 H^H r via Cholesky.
 * The O(M^3 N^3) oracle the banded path is measured against.
 */
inline Vec lmmse_direct(const Mat& H, const Vec& r, const NoiseModel& noise) {
  Mat Q = H.adjoint() * H;
  Q.diagonal().array() += noise.variance;
  Eigen::LLT<Mat> llt(Q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("lmmse_direct: normal-equation matrix not positive definite");
  return llt.solve(H.adjoint() * r);
}

/**
 * Same LMMSE solve with the normal-equation matrix assembled from the
 * modulo-band structure instead of a dense H^H H product: Q has nonzero
 * entries only at offset differences of the Doppler support, so assembly is
 * O(|support|^2 MN) and the Cholesky solve dominates. Output matches
 * lmmse_direct on the dense matrix to rounding.
 */
inline Vec lmmse_structured(const FdChannelOperator& op, const Vec& r, const NoiseModel& noise,
                            int dense_cap = kDenseCap) {
  const int mn = op.grid().frame_size();
  if (mn > dense_cap) throw std::invalid_argument("lmmse_structured: grid exceeds dense cap");
  const auto& offsets = op.doppler_offsets();
  Mat Q = Mat::Zero(mn, mn);
  Q.diagonal().array() += noise.variance;
  for (size_t j1 = 0; j1 < offsets.size(); ++j1) {
    for (size_t j2 = 0; j2 < offsets.size(); ++j2) {
      for (int f = 0; f < mn; ++f) {
        const int i = floor_mod(f - offsets[j1], mn);
        const int j = floor_mod(f - offsets[j2], mn);
        Q(i, j) += std::conj(op.entry(f, i)) * op.entry(f, j);
      }
    }
  }
  Eigen::LLT<Mat> llt(Q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("lmmse_structured: normal-equation matrix not positive definite");
  return llt.solve(op.apply_adjoint(r));
}

struct CgmResult {
  Vec solution;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_trace;  // squared residual norm per iteration
};

/**
 * Conjugate gradient solve of (H^H H + sigma^2 I) s = H^H r with H banded.
 * H^H H is applied as two banded mat-vecs per iteration. Stops when the
 * squared residual norm drops below eps^2 or after max_iter iterations
 * (non-convergence returns the best iterate with converged = false).
 */
inline CgmResult cgm_equalize(const BandedMatrix& H, const Vec& r, const NoiseModel& noise,
                              double eps = 1e-6, int max_iter = 250) {
  if (!(noise.variance > 0)) throw std::invalid_argument("cgm_equalize: sigma^2 must be > 0");
  if (!(eps >= 0)) throw std::invalid_argument("cgm_equalize: eps must be >= 0");
  const Eigen::Index n = H.size();
  if (r.size() != n) throw std::invalid_argument("cgm_equalize: length mismatch");

  CgmResult res;
  const Vec b_vec = H.multiply_adjoint(r);
  Vec sol = Vec::Zero(n);
  Vec c = b_vec;  // residual at sol = 0
  Vec p = c;
  double c_norm = c.squaredNorm();
  res.residual_trace.push_back(c_norm);

  const double eps2 = eps * eps;
  for (int i = 1; i <= max_iter; ++i) {
    const Vec a_p = H.multiply_adjoint(H.multiply(p)) + noise.variance * p;
    const double denom = std::real(p.dot(a_p));  // p^H a_p, real for Hermitian PD
    if (denom <= 0) break;
    const double alpha = c_norm / denom;
    sol += alpha * p;
    c -= alpha * a_p;
    const double c_norm_new = c.squaredNorm();
    res.residual_trace.push_back(c_norm_new);
    res.iterations = i;
    if (c_norm_new < eps2) {
      res.converged = true;
      break;
    }
    p = c + (c_norm_new / c_norm) * p;
    c_norm = c_norm_new;
  }
  res.solution = std::move(sol);
  return res;
}

/// Residual trace as CSV (iteration, c_norm).
inline void write_residual_csv(const CgmResult& res, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_residual_csv: cannot open " + path);
  out << "iteration,c_norm\n";
  char line[64];
  for (size_t i = 0; i < res.residual_trace.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.17g\n", i, res.residual_trace[i]);
    out << line;
  }
}

/**
 * Minimum-distance detection of the masked symbols:
 * x'[q] = argmin_a |(N^H R^H s)[q] - a|, ties to the lowest point index.
 * Returns the detected constellation points.
 */
inline Vec detect(const Vec& s_eq, const NullSpaceMask& mask, const Constellation& c) {
  const Vec z = mask_decode(s_eq, mask);
  Vec out(z.size());
  for (Eigen::Index q = 0; q < z.size(); ++q) out[q] = c.points[c.decide(z[q])];
  return out;
}

}  // namespace zakotfs
