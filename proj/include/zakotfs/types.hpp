// types.hpp - Core domain types for the Zak-OTFS simulation library.
//
// Defines the delay-Doppler grid geometry, the three signal representations
// (DD frame, FD carrier vector, TD signal) and the symbol constellation.
// All heavy linear algebra is carried by Eigen complex matrices/vectors.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zakotfs {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Unit phasor e^{j*angle}.
inline cxd cis(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Floored modulo: result in [0, m) for any sign of a.
inline int floor_mod(int a, int m) {
  int r = a % m;
  return (r < 0) ? r + m : r;
}

// Dense matrices (R, H, masks, LMMSE oracles) are only materialized up to
// this frame size; larger grids must use the operational forms.
inline constexpr int kDenseCap = 4096;

/**
 * Geometry of the M x N delay-Doppler lattice.
 *
 * M delay bins and N Doppler bins over a fundamental rectangle of width
 * tau_p along delay and nu_p along Doppler, with tau_p * nu_p = 1. All
 * derived rates follow: bandwidth B = M*nu_p, frame duration T = N*tau_p,
 * frame size MN (and B*T = MN).
 */
struct GridParams {
  int M = 0;        // delay bins
  int N = 0;        // Doppler bins
  double nu_p = 0;  // Doppler period in Hz

  GridParams() = default;
  GridParams(int m, int n, double doppler_period_hz)
      : M(m), N(n), nu_p(doppler_period_hz) {
    if (M < 1 || N < 1) throw std::invalid_argument("GridParams: M and N must be >= 1");
    if (!(nu_p > 0.0)) throw std::invalid_argument("GridParams: nu_p must be positive");
  }

  double tau_p() const { return 1.0 / nu_p; }         // delay period, seconds
  double bandwidth() const { return M * nu_p; }       // B, Hz
  double duration() const { return N * tau_p(); }     // T, seconds
  int frame_size() const { return M * N; }            // MN

  bool operator==(const GridParams& o) const {
    return M == o.M && N == o.N && nu_p == o.nu_p;
  }
};

/**
 * An M x N grid of DD-domain symbols X[k0, l0], k0 = delay index (row),
 * l0 = Doppler index (column).
 *
 * The flattened order is column-major with the delay index fastest, so
 * vec(X)[k0 + l0*M] = X[k0, l0]; this matches the carrier indexing
 * i = k0 + l0*M used throughout.
 */
struct DDFrame {
  GridParams grid;
  Mat X;  // M x N

  DDFrame() = default;
  explicit DDFrame(const GridParams& g) : grid(g), X(Mat::Zero(g.M, g.N)) {}
  DDFrame(const GridParams& g, Mat values) : grid(g), X(std::move(values)) {
    if (X.rows() != grid.M || X.cols() != grid.N)
      throw std::invalid_argument("DDFrame: dimensions do not match grid");
  }

  // Column-major flatten (delay fastest).
  Vec vec() const { return Eigen::Map<const Vec>(X.data(), X.size()); }

  static DDFrame from_vec(const GridParams& g, const Vec& v) {
    if (v.size() != g.frame_size())
      throw std::invalid_argument("DDFrame::from_vec: length must be MN");
    return DDFrame(g, Eigen::Map<const Mat>(v.data(), g.M, g.N));
  }
};

/// Length-MN vector of FD carrier symbols s[i].
struct FDVector {
  GridParams grid;
  Vec s;

  FDVector() = default;
  explicit FDVector(const GridParams& g) : grid(g), s(Vec::Zero(g.frame_size())) {}
  FDVector(const GridParams& g, Vec values) : grid(g), s(std::move(values)) {
    if (s.size() != grid.frame_size())
      throw std::invalid_argument("FDVector: length must be MN");
  }
};

/// One fundamental period of the MN-periodic discrete-time signal x[n].
struct TDSignal {
  GridParams grid;
  Vec x;

  TDSignal() = default;
  explicit TDSignal(const GridParams& g) : grid(g), x(Vec::Zero(g.frame_size())) {}
  TDSignal(const GridParams& g, Vec values) : grid(g), x(std::move(values)) {
    if (x.size() != grid.frame_size())
      throw std::invalid_argument("TDSignal: length must be MN");
  }
};

/**
 * Symbol constellation with unit average energy.
 *
 * The 4-QAM Gray mapping is fixed as: bit pair (b0, b1) -> point
 * ((1-2*b0) + j*(1-2*b1)) / sqrt(2), i.e. b0 selects the real sign and b1
 * the imaginary sign, 0 -> +. Point index = 2*b0 + b1:
 *
 *   index 0, bits 00 -> (+1+j)/sqrt(2)
 *   index 1, bits 01 -> (+1-j)/sqrt(2)
 *   index 2, bits 10 -> (-1+j)/sqrt(2)
 *   index 3, bits 11 -> (-1-j)/sqrt(2)
 *
 * Adjacent points along either axis differ in exactly one bit.
 */
struct Constellation {
  std::string name;
  std::vector<cxd> points;
  int bits_per_symbol = 0;

  static Constellation qam4() {
    const double a = 1.0 / std::sqrt(2.0);
    Constellation c;
    c.name = "4-QAM";
    c.points = {{a, a}, {a, -a}, {-a, a}, {-a, -a}};
    c.bits_per_symbol = 2;
    return c;
  }

  // Nearest point, ties broken by lowest index.
  int decide(cxd value) const {
    int best = 0;
    double best_d = std::norm(value - points[0]);
    for (int q = 1; q < static_cast<int>(points.size()); ++q) {
      double d = std::norm(value - points[q]);
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    return best;
  }

  double min_distance() const {
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < points.size(); ++a)
      for (size_t b = a + 1; b < points.size(); ++b)
        dmin = std::min(dmin, std::abs(points[a] - points[b]));
    return dmin;
  }
};

/// Map a bit stream onto constellation symbols (MSB-first per symbol).
inline Vec qam_map(const std::vector<uint8_t>& bits, const Constellation& c) {
  if (bits.size() % c.bits_per_symbol != 0)
    throw std::invalid_argument("qam_map: bit count not divisible by bits_per_symbol");
  const size_t n_sym = bits.size() / c.bits_per_symbol;
  Vec out(n_sym);
  for (size_t s = 0; s < n_sym; ++s) {
    int idx = 0;
    for (int b = 0; b < c.bits_per_symbol; ++b)
      idx = (idx << 1) | (bits[s * c.bits_per_symbol + b] & 1);
    out[s] = c.points[idx];
  }
  return out;
}

/// Nearest-point demap back to bits; inverse of qam_map on noiseless symbols.
inline std::vector<uint8_t> qam_demap(const Vec& symbols, const Constellation& c) {
  std::vector<uint8_t> bits(symbols.size() * c.bits_per_symbol);
  for (Eigen::Index s = 0; s < symbols.size(); ++s) {
    int idx = c.decide(symbols[s]);
    for (int b = c.bits_per_symbol - 1; b >= 0; --b) {
      bits[s * c.bits_per_symbol + b] = static_cast<uint8_t>(idx & 1);
      idx >>= 1;
    }
  }
  return bits;
}

}  // namespace zakotfs
