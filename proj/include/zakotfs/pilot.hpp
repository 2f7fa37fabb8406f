// pilot.hpp - Spread-pilot channel estimation with turbo refinement.
//
// A full-frame Zadoff-Chu pilot is superimposed on the masked data symbols:
// x = sqrt(e_d) N x' + sqrt(e_p) x_s. The receiver estimates the effective
// channel taps from the cross-ambiguity between the received DD frame and
// the pilot,
//
//   h_hat[k, l] = (1/sqrt(e_p)) * sum_{k', l'} y[k', l']
//                 * conj(x_s[k'-k, l'-l]) * e^{-j 2 pi l' (k'-k) / MN},
//
// with the pilot extended quasi-periodically: x[k + nM, l] = e^{j 2 pi n l / N} x[k, l]
// and x[k, l + mN] = x[k, l] (the extension of every Zak-domain signal).
// Turbo iterations alternate data cancellation and re-estimation.

#pragma once

#include "zakotfs/equalizer.hpp"

#include <numeric>
#include <optional>

namespace zakotfs {

/// Unit-energy spread pilot generated from a Zadoff-Chu sequence.
struct SpreadPilot {
  GridParams grid;
  int root = 0;
  Mat x_s;  // M x N, Frobenius norm 1

  Vec vec() const { return Eigen::Map<const Vec>(x_s.data(), x_s.size()); }
};

/**
 * Zadoff-Chu pilot x_zc[n] = e^{-j pi root n (n+1) / MN} laid onto the DD
 * grid in flattened order i = k0 + l0*M, normalized to unit frame energy.
 * The root must be coprime with MN (ideal autocorrelation needs odd MN).
 */
inline SpreadPilot make_pilot(const GridParams& grid, int root) {
  const int mn = grid.frame_size();
  if (root <= 0 || std::gcd(root, mn) != 1)
    throw std::invalid_argument("make_pilot: root must be coprime with MN");
  SpreadPilot p;
  p.grid = grid;
  p.root = root;
  Vec zc(mn);
  const double scale = 1.0 / std::sqrt(static_cast<double>(mn));
  for (int n = 0; n < mn; ++n) {
    // n(n+1) can overflow int for large frames; widen first.
    const double phase = -kPi * static_cast<double>(root) *
                         (static_cast<int64_t>(n) * (n + 1) % (2LL * mn)) / mn;
    zc[n] = scale * cis(phase);
  }
  p.x_s = Eigen::Map<const Mat>(zc.data(), grid.M, grid.N);
  return p;
}

/// Pilot/data energy split; pdr_db = 10 log10(e_p / e_d).
struct PowerSplit {
  double e_p = 0.0;
  double e_d = 1.0;

  static PowerSplit from_pdr_db(double pdr_db, double data_energy = 1.0) {
    PowerSplit s;
    s.e_d = data_energy;
    s.e_p = data_energy * std::pow(10.0, pdr_db / 10.0);
    return s;
  }
  double pdr_db() const { return 10.0 * std::log10(e_p / e_d); }
};

/// Transmitted DD frame sqrt(e_d) * data + sqrt(e_p) * pilot (flattened).
inline Vec superimpose(const Vec& masked_data_dd, const SpreadPilot& pilot,
                       const PowerSplit& split) {
  if (masked_data_dd.size() != pilot.grid.frame_size())
    throw std::invalid_argument("superimpose: data vector must have MN entries");
  return std::sqrt(split.e_d) * masked_data_dd + std::sqrt(split.e_p) * pilot.vec();
}

/// Quasi-periodic DD-frame lookup at arbitrary integer (k, l).
inline cxd qp_get(const Mat& X, int k, int l, int M, int N) {
  const int k0 = floor_mod(k, M);
  const int l0 = floor_mod(l, N);
  const int n_shift = (k - k0) / M;
  return X(k0, l0) * cis(2.0 * kPi * static_cast<double>(n_shift) * l0 / N);
}

/**
 * Cross-ambiguity estimate of the effective channel over the crop window
 * k in [0, k_max], l in [-l_max, l_max]; scaled by 1/sqrt(e_p) so the
 * estimate targets h_eff directly.
 *
 * A channel tap at (k, l) acts on the DD frame as the twisted shift
 * Y[k', l'] = h * x_qp[k'-k, l'-l] * e^{j 2 pi l (k'-k) / MN}, so the
 * matched-filter kernel carries the tap Doppler phase (an integer tap is
 * recovered exactly, off-tap output sits at the pilot's self-ambiguity
 * sidelobe level).
 */
inline EffectiveChannel cross_ambiguity(const DDFrame& y_dd, const SpreadPilot& pilot,
                                        int k_max, int l_max, double e_p) {
  const auto& g = y_dd.grid;
  if (!(g == pilot.grid)) throw std::invalid_argument("cross_ambiguity: grid mismatch");
  const int mn = g.frame_size();
  EffectiveChannel est(g, k_max, l_max);
  const double scale = 1.0 / std::sqrt(e_p);
  for (int k = 0; k <= k_max; ++k) {
    for (int l = -l_max; l <= l_max; ++l) {
      cxd acc = 0.0;
      for (int kp = 0; kp < g.M; ++kp) {
        const cxd twist = cis(-2.0 * kPi * static_cast<double>(l) * (kp - k) / mn);
        for (int lp = 0; lp < g.N; ++lp) {
          const cxd xs = qp_get(pilot.x_s, kp - k, lp - l, g.M, g.N);
          acc += y_dd.X(kp, lp) * std::conj(xs) * twist;
        }
      }
      est.at(k, l) = scale * acc;
    }
  }
  return est;
}

/// Reconstructed channel operators derived from an estimated tap set.
struct ChannelEstimate {
  EffectiveChannel h_hat;
  PeriodizedChannel periodized;
  FdChannelOperator op;

  Mat dense_fd(int cap = kDenseCap) const { return op.dense(cap); }
  Mat dense_dd(int cap = kDenseCap) const { return build_H_dd(periodized, cap).H; }
};

/// Same build path as the true channel: periodize, then the FD closed form.
inline ChannelEstimate reconstruct(const EffectiveChannel& h_hat) {
  ChannelEstimate est;
  est.h_hat = h_hat;
  est.periodized = periodize(h_hat);
  est.op = FdChannelOperator(est.periodized);
  return est;
}

/// Remove the pilot from the received DD frame using the estimated channel.
inline Vec pilot_cancel(const Vec& y_dd, const ChannelEstimate& est, const SpreadPilot& pilot,
                        double e_p) {
  return y_dd - std::sqrt(e_p) * dd_channel_apply(est.op, pilot.vec());
}

/// Remove re-encoded detected data, leaving a pilot-plus-noise frame.
inline Vec data_cancel(const Vec& y_dd, const ChannelEstimate& est, const Vec& masked_data_dd,
                       double e_d) {
  return y_dd - std::sqrt(e_d) * dd_channel_apply(est.op, masked_data_dd);
}

/// Normalized mean square error over the union of the two tap windows.
inline double nmse(const EffectiveChannel& h_hat, const EffectiveChannel& h_true) {
  const int k_max = std::max(h_hat.k_max, h_true.k_max);
  const int l_max = std::max(h_hat.l_max, h_true.l_max);
  double num = 0, den = 0;
  for (int k = 0; k <= k_max; ++k) {
    for (int l = -l_max; l <= l_max; ++l) {
      num += std::norm(h_hat.at(k, l) - h_true.at(k, l));
      den += std::norm(h_true.at(k, l));
    }
  }
  if (den == 0) throw std::invalid_argument("nmse: reference channel has zero energy");
  return num / den;
}

struct TurboConfig {
  int k_max = 0;        // estimation delay crop
  int l_max = 0;        // estimation Doppler crop (per side)
  int b = 0;            // equalizer half-bandwidth
  double eps = 1e-6;
  int max_iter = 250;
  int n_turbo = 0;      // refinement rounds after the initial estimate
};

struct TurboResult {
  ChannelEstimate estimate;
  Vec x_hat;                       // detected masked symbols (MN - 2b)
  std::vector<double> nmse_trace;  // one entry per estimation stage
  int cgm_iterations = 0;          // total over all equalizations
  bool converged = true;           // false if any CGM hit max_iter
};

/**
 * Spread-pilot receiver. Stage 0 estimates from the raw frame, cancels the
 * pilot, equalizes (banded CGM) and detects; each turbo round re-estimates
 * from a data-cancelled frame and repeats. The NMSE trace is scored against
 * h_true when provided.
 */
inline TurboResult turbo_estimate(const Vec& y_dd, const SpreadPilot& pilot,
                                  const PowerSplit& split, const NoiseModel& noise,
                                  const NullSpaceMask& mask, const Constellation& constellation,
                                  const TurboConfig& cfg,
                                  const EffectiveChannel* h_true = nullptr) {
  const GridParams& g = pilot.grid;
  TurboResult res;

  auto estimate_from = [&](const Vec& frame) {
    const EffectiveChannel h =
        cross_ambiguity(DDFrame::from_vec(g, frame), pilot, cfg.k_max, cfg.l_max, split.e_p);
    if (h_true) res.nmse_trace.push_back(nmse(h, *h_true));
    return reconstruct(h);
  };

  auto equalize_detect = [&](const ChannelEstimate& est, const Vec& y_data) {
    // Normalize to unit-energy symbols: r / sqrt(e_d), noise sigma^2 / e_d.
    const Vec r_fd = idfzt(DDFrame::from_vec(g, y_data)).s / std::sqrt(split.e_d);
    const BandedMatrix band = extract_band(est.op, cfg.b);
    const NoiseModel eff{noise.variance / split.e_d};
    CgmResult cg = cgm_equalize(band, r_fd, eff, cfg.eps, cfg.max_iter);
    res.cgm_iterations += cg.iterations;
    res.converged = res.converged && cg.converged;
    return detect(cg.solution, mask, constellation);
  };

  res.estimate = estimate_from(y_dd);
  Vec y_data = pilot_cancel(y_dd, res.estimate, pilot, split.e_p);
  res.x_hat = equalize_detect(res.estimate, y_data);

  for (int t = 1; t <= cfg.n_turbo; ++t) {
    const Vec y_pil = data_cancel(y_dd, res.estimate, mask.Nmat * res.x_hat, split.e_d);
    res.estimate = estimate_from(y_pil);
    y_data = pilot_cancel(y_dd, res.estimate, pilot, split.e_p);
    res.x_hat = equalize_detect(res.estimate, y_data);
  }
  return res;
}

}  // namespace zakotfs
