// channel.hpp - Doubly-spread multipath channels in the delay-Doppler domain.
//
// A physical channel is a set of paths (complex gain, fractional delay,
// fractional Doppler). Transmit/receive pulse shaping turns the paths into
// a discrete effective channel h_eff[k, l] on the delay-Doppler tap grid:
//
//   h_eff[k, l] = sum_p h_p * g_tau(k/B - tau_p) * g_nu(l/T - nu_p)
//                       * e^{-j 2 pi nu_p (k/B - tau_p)}
//
// where g_tau / g_nu are the combined (tx conv rx) filter responses along
// each axis, evaluated in bin units. The filter definitions live in
// docs/pulses.md; with ideal sinc filters an integer-shift path reduces to
// a Kronecker delta tap. Periodizing h_eff modulo MN in both indices gives
// the taps that drive all channel matrices.

#pragma once

#include "zakotfs/rng.hpp"
#include "zakotfs/types.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

namespace zakotfs {

struct Path {
  cxd gain;
  double delay_s;    // tau_i >= 0
  double doppler_hz; // nu_i, signed
};

struct PathSet {
  std::vector<Path> paths;

  double total_power() const {
    double p = 0;
    for (const auto& pt : paths) p += std::norm(pt.gain);
    return p;
  }
};

enum class PulseKind { Sinc, Rrc, Gauss, GaussSinc };

/**
 * Combined tx*rx pulse response pair for the delay and Doppler axes.
 * beta_* are RRC roll-offs in [0,1]; alpha_* are Gaussian width parameters.
 */
struct PulseShape {
  PulseKind kind = PulseKind::Rrc;
  double beta_tau = 0.6, beta_nu = 0.6;
  double alpha_tau = 0.0, alpha_nu = 0.0;

  static PulseShape sinc() { return {PulseKind::Sinc, 0, 0, 0, 0}; }
  static PulseShape rrc(double bt, double bn) {
    if (bt < 0 || bt > 1 || bn < 0 || bn > 1)
      throw std::invalid_argument("PulseShape: RRC roll-off must be in [0,1]");
    return {PulseKind::Rrc, bt, bn, 0, 0};
  }
  static PulseShape gauss(double at, double an) { return {PulseKind::Gauss, 0, 0, at, an}; }
  static PulseShape gauss_sinc(double at, double an) {
    return {PulseKind::GaussSinc, 0, 0, at, an};
  }
};

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Raised-cosine time response (the matched RRC pair combined), roll-off beta.
inline double raised_cosine(double x, double beta) {
  if (beta <= 0.0) return sinc(x);
  const double denom = 1.0 - (2.0 * beta * x) * (2.0 * beta * x);
  if (std::abs(denom) < 1e-8) {
    // Removable singularity at |x| = 1/(2 beta).
    return (kPi / 4.0) * sinc(1.0 / (2.0 * beta));
  }
  return sinc(x) * std::cos(kPi * beta * x) / denom;
}

/// Evaluate the combined pulse response at bin-normalized offset x.
inline double pulse_response(const PulseShape& p, double x, bool delay_axis) {
  switch (p.kind) {
    case PulseKind::Sinc:
      return sinc(x);
    case PulseKind::Rrc:
      return raised_cosine(x, delay_axis ? p.beta_tau : p.beta_nu);
    case PulseKind::Gauss: {
      const double a = delay_axis ? p.alpha_tau : p.alpha_nu;
      return std::exp(-a * x * x);
    }
    case PulseKind::GaussSinc: {
      const double a = delay_axis ? p.alpha_tau : p.alpha_nu;
      return std::exp(-a * x * x) * sinc(x);
    }
  }
  throw std::invalid_argument("pulse_response: unsupported pulse kind");
}

/**
 * Discrete effective channel taps on the window k in [0, k_max],
 * l in [-l_max, l_max]. Entries below the truncation floor (relative to the
 * peak magnitude) are zeroed. Doubles as the container for channel
 * estimates over an estimation crop window.
 */
struct EffectiveChannel {
  GridParams grid;
  int k_max = 0;
  int l_max = 0;
  Mat taps;  // (k_max+1) x (2*l_max+1); column j holds Doppler index j - l_max

  // The container accepts any window so that periodization (which folds
  // aliases) is exercisable; physically synthesized channels stay inside
  // one fundamental period via the effective_channel defaults.
  EffectiveChannel() = default;
  EffectiveChannel(const GridParams& g, int kmax, int lmax)
      : grid(g), k_max(kmax), l_max(lmax), taps(Mat::Zero(kmax + 1, 2 * lmax + 1)) {
    if (kmax < 0 || lmax < 0)
      throw std::invalid_argument("EffectiveChannel: window bounds must be >= 0");
  }

  cxd at(int k, int l) const {
    if (k < 0 || k > k_max || l < -l_max || l > l_max) return 0.0;
    return taps(k, l + l_max);
  }
  cxd& at(int k, int l) { return taps(k, l + l_max); }

  double energy() const { return taps.squaredNorm(); }
};

/// Veh-A power-delay profile: delays in microseconds and relative powers in dB.
inline const std::vector<std::pair<double, double>>& veh_a_profile() {
  static const std::vector<std::pair<double, double>> profile = {
      {0.00, 0.0}, {0.31, -1.0}, {0.71, -9.0}, {1.09, -10.0}, {1.73, -15.0}, {2.51, -20.0}};
  return profile;
}

/**
 * Draw a Veh-A channel realization: six paths with the standard power-delay
 * profile (normalized to unit total power), uniform random gain phases, and
 * per-path Doppler nu_i = nu_max * cos(theta_i) with theta_i ~ U(-pi, pi).
 * Deterministic for a fixed seed.
 */
inline PathSet veh_a_paths(double nu_max_hz, uint64_t rng_seed) {
  if (nu_max_hz < 0) throw std::invalid_argument("veh_a_paths: nu_max must be >= 0");
  RngStream rng(rng_seed);
  const auto& profile = veh_a_profile();
  double total = 0;
  for (const auto& [delay_us, power_db] : profile) total += std::pow(10.0, power_db / 10.0);

  PathSet ps;
  for (const auto& [delay_us, power_db] : profile) {
    const double power = std::pow(10.0, power_db / 10.0) / total;
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    const double theta = rng.uniform(-kPi, kPi);
    Path p;
    p.gain = std::sqrt(power) * cis(phase);
    p.delay_s = delay_us * 1e-6;
    p.doppler_hz = nu_max_hz * std::cos(theta);
    ps.paths.push_back(p);
  }
  return ps;
}

struct EffectiveChannelOptions {
  int k_max = -1;             // default: M - 1 (full delay period)
  int l_max = -1;             // default: ceil(5 * nu_abs_max * T), capped at (N-1)/2
  double truncation_floor = 1e-6;  // relative to peak |h_eff|
};

/**
 * Pulse-shape a path set into discrete effective-channel taps.
 * Paths must lie inside the supported window (delay within one delay
 * period, Doppler within the chosen window).
 */
inline EffectiveChannel effective_channel(const PathSet& paths, const PulseShape& pulse,
                                          const GridParams& grid,
                                          const EffectiveChannelOptions& opt = {}) {
  const double B = grid.bandwidth();
  const double T = grid.duration();

  double nu_abs_max = 0;
  for (const auto& p : paths.paths) {
    if (p.delay_s < 0 || p.delay_s >= grid.tau_p())
      throw std::invalid_argument("effective_channel: path delay outside fundamental period");
    nu_abs_max = std::max(nu_abs_max, std::abs(p.doppler_hz));
  }

  const int k_max = (opt.k_max >= 0) ? opt.k_max : grid.M - 1;
  int l_max = opt.l_max;
  if (l_max < 0) {
    l_max = static_cast<int>(std::ceil(5.0 * nu_abs_max * T));
    l_max = std::min(l_max, (grid.N - 1) / 2);
  }

  EffectiveChannel h(grid, k_max, l_max);
  for (int k = 0; k <= k_max; ++k) {
    for (int l = -l_max; l <= l_max; ++l) {
      cxd acc = 0.0;
      for (const auto& p : paths.paths) {
        const double du = k / B - p.delay_s;        // delay offset, seconds
        const double dv = l / T - p.doppler_hz;     // Doppler offset, Hz
        const double g_tau = pulse_response(pulse, du * B, true);
        const double g_nu = pulse_response(pulse, dv * T, false);
        acc += p.gain * g_tau * g_nu * cis(-2.0 * kPi * p.doppler_hz * du);
      }
      h.at(k, l) = acc;
    }
  }

  // Truncate negligible taps relative to the peak.
  const double peak = h.taps.cwiseAbs().maxCoeff();
  if (peak > 0) {
    const double floor_mag = opt.truncation_floor * peak;
    for (int k = 0; k <= k_max; ++k)
      for (int l = -l_max; l <= l_max; ++l)
        if (std::abs(h.at(k, l)) < floor_mag) h.at(k, l) = 0.0;
  }
  return h;
}

/// One periodized tap: indices modulo MN.
struct Tap {
  int k;  // delay index in [0, MN)
  int l;  // Doppler index in [0, MN)
  cxd h;
};

/**
 * The MN-periodized channel h[k, l] = sum_{p,q} h_eff[k + p*MN, l + q*MN],
 * stored sparsely over its support.
 */
struct PeriodizedChannel {
  GridParams grid;
  std::vector<Tap> taps;

  double energy() const {
    double e = 0;
    for (const auto& t : taps) e += std::norm(t.h);
    return e;
  }

  /// Distinct Doppler indices present in the support, sorted ascending.
  std::vector<int> doppler_support() const {
    std::vector<int> ls;
    for (const auto& t : taps) ls.push_back(t.l);
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    return ls;
  }
};

/// Wrap effective-channel taps modulo MN in both indices; aliases sum.
inline PeriodizedChannel periodize(const EffectiveChannel& h_eff) {
  const int mn = h_eff.grid.frame_size();
  PeriodizedChannel out;
  out.grid = h_eff.grid;
  // Accumulate into a map keyed by wrapped indices.
  std::vector<std::pair<int64_t, cxd>> acc;
  for (int k = 0; k <= h_eff.k_max; ++k) {
    for (int l = -h_eff.l_max; l <= h_eff.l_max; ++l) {
      const cxd v = h_eff.at(k, l);
      if (v == cxd(0.0, 0.0)) continue;
      const int kb = floor_mod(k, mn);
      const int lb = floor_mod(l, mn);
      acc.emplace_back(static_cast<int64_t>(kb) * mn + lb, v);
    }
  }
  std::sort(acc.begin(), acc.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 0; i < acc.size();) {
    cxd sum = 0.0;
    size_t j = i;
    while (j < acc.size() && acc[j].first == acc[i].first) sum += acc[j++].second;
    out.taps.push_back({static_cast<int>(acc[i].first / mn),
                        static_cast<int>(acc[i].first % mn), sum});
    i = j;
  }
  return out;
}

/// Serialize taps as plain text, one "k l re im" line per tap.
inline void save_taps(const PeriodizedChannel& ch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_taps: cannot open " + path);
  out << "# k l re im\n";
  char line[128];
  for (const auto& t : ch.taps) {
    std::snprintf(line, sizeof(line), "%d %d %.17g %.17g\n", t.k, t.l, t.h.real(), t.h.imag());
    out << line;
  }
}

inline PeriodizedChannel load_taps(const GridParams& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_taps: cannot open " + path);
  PeriodizedChannel ch;
  ch.grid = grid;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    Tap t;
    double re, im;
    if (std::sscanf(line.c_str(), "%d %d %lg %lg", &t.k, &t.l, &re, &im) != 4)
      throw std::runtime_error("load_taps: malformed line: " + line);
    t.h = cxd(re, im);
    ch.taps.push_back(t);
  }
  return ch;
}

}  // namespace zakotfs
