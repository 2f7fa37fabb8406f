// baselines.hpp - Comparison schemes and fading diagnostics.
//
// Two reference transceivers share the Zak-OTFS channel taps so every
// scheme sees the same physical channel:
//
//  * direct FD mounting: information symbols placed straight on the MN
//    DFT carriers (spacing B/MN), r = H x + w;
//  * CP-OFDM: N symbols of M subcarriers (spacing B/M) with a cyclic
//    prefix, passed through the time-domain channel as a linear operator.
//
// The energy-per-carrier diagnostic diag(H^H H) separates non-fading bases
// (pulsone: constant) from fading ones (DFT, CP-OFDM: carrier-dependent).

#pragma once

#include "zakotfs/equalizer.hpp"

namespace zakotfs {

struct OfdmConfig {
  int n_subcarriers = 0;  // M, one OFDM symbol per delay period
  int cp_len = 4;         // delay bins
  int n_symbols = 0;      // N per frame

  OfdmConfig() = default;
  OfdmConfig(int m, int n, int cp) : n_subcarriers(m), cp_len(cp), n_symbols(n) {
    if (cp_len < 0 || cp_len >= n_subcarriers)
      throw std::invalid_argument("OfdmConfig: need 0 <= cp_len < n_subcarriers");
  }
  static OfdmConfig for_grid(const GridParams& g, int cp = 4) { return {g.M, g.N, cp}; }

  int symbol_len() const { return n_subcarriers + cp_len; }
  int frame_len() const { return n_symbols * symbol_len(); }
};

/**
 * Apply the periodized channel taps to a finite signal as a linear
 * (non-circular) operator; the Doppler phase ramp stays referenced to the
 * Zak frame size MN so all schemes see identical path Dopplers.
 */
inline Vec linear_channel_apply(const PeriodizedChannel& ch, const Vec& x) {
  const int mn = ch.grid.frame_size();
  const Eigen::Index len = x.size();
  Vec y = Vec::Zero(len);
  for (const auto& t : ch.taps) {
    for (Eigen::Index n = t.k; n < len; ++n) {
      y[n] += t.h * x[n - t.k] * cis(2.0 * kPi * static_cast<double>(t.l) * (n - t.k) / mn);
    }
  }
  return y;
}

/// IDFT + cyclic prefix per symbol; grid columns are OFDM symbols.
inline Vec ofdm_modulate(const Mat& symbols, const OfdmConfig& cfg) {
  if (symbols.rows() != cfg.n_subcarriers || symbols.cols() != cfg.n_symbols)
    throw std::invalid_argument("ofdm_modulate: grid shape mismatch");
  Vec frame(cfg.frame_len());
  for (int sym = 0; sym < cfg.n_symbols; ++sym) {
    const Vec td = unitary_dft(symbols.col(sym), +1);
    const Eigen::Index base = static_cast<Eigen::Index>(sym) * cfg.symbol_len();
    frame.segment(base, cfg.cp_len) = td.tail(cfg.cp_len);
    frame.segment(base + cfg.cp_len, cfg.n_subcarriers) = td;
  }
  return frame;
}

/// CP removal + DFT per symbol.
inline Mat ofdm_demodulate(const Vec& frame, const OfdmConfig& cfg) {
  if (frame.size() != cfg.frame_len())
    throw std::invalid_argument("ofdm_demodulate: frame length mismatch");
  Mat out(cfg.n_subcarriers, cfg.n_symbols);
  for (int sym = 0; sym < cfg.n_symbols; ++sym) {
    const Eigen::Index base = static_cast<Eigen::Index>(sym) * cfg.symbol_len() + cfg.cp_len;
    out.col(sym) = unitary_dft(frame.segment(base, cfg.n_subcarriers), -1);
  }
  return out;
}

/**
 * Full per-frame OFDM channel matrix (ISI and ICI included): maps the
 * flattened tx grid (index sym * M + m) to the flattened rx grid. Column
 * route: one modulate-channel-demodulate pass per basis symbol.
 */
inline Mat ofdm_frame_matrix(const PeriodizedChannel& ch, const OfdmConfig& cfg) {
  const int mn = cfg.n_subcarriers * cfg.n_symbols;
  Mat G(mn, mn);
  Mat basis = Mat::Zero(cfg.n_subcarriers, cfg.n_symbols);
  for (int col = 0; col < mn; ++col) {
    basis(col % cfg.n_subcarriers, col / cfg.n_subcarriers) = 1.0;
    const Mat rx = ofdm_demodulate(linear_channel_apply(ch, ofdm_modulate(basis, cfg)), cfg);
    G.col(col) = Eigen::Map<const Vec>(rx.data(), rx.size());
    basis(col % cfg.n_subcarriers, col / cfg.n_subcarriers) = 0.0;
  }
  return G;
}

enum class Receiver { Genie, OneTap };

/**
 * CP-OFDM transceiver: map bits to 4-QAM, modulate, pass through the TD
 * channel with AWGN, then either joint LMMSE over the whole frame (genie)
 * or per-carrier division by the diagonal channel entry (one-tap).
 */
inline std::vector<uint8_t> ofdm_transceive(const std::vector<uint8_t>& bits,
                                            const PeriodizedChannel& ch, Receiver receiver,
                                            const NoiseModel& noise, RngStream& rng,
                                            const OfdmConfig& cfg,
                                            const Constellation& constellation) {
  const int mn = cfg.n_subcarriers * cfg.n_symbols;
  const Vec symbols = qam_map(bits, constellation);
  if (symbols.size() != mn) throw std::invalid_argument("ofdm_transceive: need MN symbols");
  const Mat grid_syms = Eigen::Map<const Mat>(symbols.data(), cfg.n_subcarriers, cfg.n_symbols);

  Vec rx_td = linear_channel_apply(ch, ofdm_modulate(grid_syms, cfg));
  if (noise.variance > 0) rx_td += rng.cnormal_vec(rx_td.size(), noise.variance);
  const Mat rx_grid = ofdm_demodulate(rx_td, cfg);
  const Vec r = Eigen::Map<const Vec>(rx_grid.data(), rx_grid.size());

  const Mat G = ofdm_frame_matrix(ch, cfg);
  Vec eq(mn);
  if (receiver == Receiver::Genie) {
    eq = lmmse_direct(G, r, noise);
  } else {
    for (int i = 0; i < mn; ++i) {
      const cxd d = G(i, i);
      eq[i] = (std::abs(d) > 0) ? r[i] / d : cxd(0.0, 0.0);
    }
  }
  Vec hard(mn);
  for (int i = 0; i < mn; ++i) hard[i] = constellation.points[constellation.decide(eq[i])];
  return qam_demap(hard, constellation);
}

/// Direct FD mounting: r = H x + w with x straight on the MN carriers.
inline Vec fd_mount_transmit(const Vec& x, const FdChannelOperator& op, const NoiseModel& noise,
                             RngStream& rng) {
  return apply_channel(op, x, noise, rng);
}

/// Equalize a direct-FD-mounted frame with LMMSE (genie) or one-tap division.
inline Vec fd_mount_equalize(const Vec& r, const FdChannelOperator& op, Receiver receiver,
                             const NoiseModel& noise, int dense_cap = kDenseCap) {
  const int mn = op.grid().frame_size();
  if (receiver == Receiver::Genie) return lmmse_direct(op.dense(dense_cap), r, noise);
  Vec eq(mn);
  for (int i = 0; i < mn; ++i) {
    const cxd d = op.entry(i, i);
    eq[i] = (std::abs(d) > 0) ? r[i] / d : cxd(0.0, 0.0);
  }
  return eq;
}

/// diag(H^H H): received energy per carrier (column squared norms).
inline RealVec energy_per_carrier(const Mat& H) {
  return H.colwise().squaredNorm().real().transpose();
}

/// Convert to dB relative to the mean energy.
inline RealVec energy_db_rel_mean(const RealVec& energy) {
  const double mean = energy.mean();
  RealVec db(energy.size());
  for (Eigen::Index i = 0; i < energy.size(); ++i) db[i] = 10.0 * std::log10(energy[i] / mean);
  return db;
}

/// Fading spread: max - min of the per-carrier energy in dB.
inline double energy_spread_db(const RealVec& energy) {
  const RealVec db = energy_db_rel_mean(energy);
  return db.maxCoeff() - db.minCoeff();
}

/**
 * Exhaustive non-fading predicate: the basis does not fade iff
 * phi_i[n - k2] conj(phi_i[n - k1]) is the same sequence for every carrier
 * i, for all k1, k2 in the channel delay support. Returns the largest
 * deviation across carriers (0 for a non-fading basis). Small grids only.
 */
inline double non_fading_deviation(const Mat& Phi, const std::vector<int>& delay_support) {
  const Eigen::Index mn = Phi.rows();
  double worst = 0;
  Vec ref(mn), cur(mn);
  for (int k1 : delay_support) {
    for (int k2 : delay_support) {
      for (Eigen::Index i = 0; i < Phi.cols(); ++i) {
        for (Eigen::Index n = 0; n < mn; ++n) {
          const Eigen::Index n2 = floor_mod(static_cast<int>(n) - k2, static_cast<int>(mn));
          const Eigen::Index n1 = floor_mod(static_cast<int>(n) - k1, static_cast<int>(mn));
          cur[n] = Phi(n2, i) * std::conj(Phi(n1, i));
        }
        if (i == 0)
          ref = cur;
        else
          worst = std::max(worst, (cur - ref).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

}  // namespace zakotfs
