// sim.hpp - Experiment orchestration: config, Monte-Carlo sweeps, output.
//
// A SimConfig describes one experiment declaratively (grid, channel, pulse,
// scheme, equalizer, estimation, sweep, output). run_sweep expands it into
// sweep points (SNR, and PDR x turbo when estimating), runs seeded trials
// per point and aggregates BER / NMSE. Every random draw derives from
// (master seed, point index, trial index), so a repeat run reproduces the
// result set exactly and the zak-dd / zak-fd-cgm schemes consume identical
// channel realizations trial for trial.

#pragma once

#include "zakotfs/baselines.hpp"
#include "zakotfs/pilot.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

namespace zakotfs {

enum class Scheme { ZakDd, ZakFdCgm, FdMount, CpOfdmGenie, CpOfdmOneTap };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ZakDd: return "zak-dd";
    case Scheme::ZakFdCgm: return "zak-fd-cgm";
    case Scheme::FdMount: return "fd-mount";
    case Scheme::CpOfdmGenie: return "cp-ofdm-genie";
    case Scheme::CpOfdmOneTap: return "cp-ofdm-1tap";
  }
  return "?";
}

enum class EstimationMode { Perfect, SpreadPilot };

struct SimConfig {
  // grid
  GridParams grid{31, 37, 30000.0};
  // channel
  std::string channel_model = "veh-a";
  double nu_max_hz = 815.0;
  // pulse
  PulseShape pulse = PulseShape::rrc(0.6, 0.6);
  // scheme
  Scheme scheme = Scheme::ZakFdCgm;
  // equalizer
  std::string band_policy = "preset";  // "preset" | "fixed"
  int b_fixed = -1;
  double eps = 1e-6;
  int max_iter = 250;
  // estimation
  EstimationMode estimation = EstimationMode::Perfect;
  int zc_root = 101;
  std::vector<double> pdr_db_list;
  std::vector<int> turbo_list{0};
  int est_delay_guard = 4;  // crop: k_max = ceil(tau_max B) + guard
  // baselines
  int ofdm_cp_len = 4;
  // sweep
  std::vector<double> snr_db_list{20.0};
  int trials = 100;
  int min_trials = 1;
  int target_errors = 0;  // 0 = always run all trials
  uint64_t master_seed = 1;
  int threads = 1;
  // output
  std::string out_dir = "out";

  int band() const {
    if (band_policy == "fixed") {
      if (b_fixed < 0) throw std::invalid_argument("SimConfig: fixed band policy needs b >= 0");
      return b_fixed;
    }
    return band_preset(pulse.kind, nu_max_hz, grid);
  }

  void validate() const {
    if (channel_model != "veh-a")
      throw std::invalid_argument("SimConfig: unknown channel model " + channel_model);
    if (band_policy != "preset" && band_policy != "fixed")
      throw std::invalid_argument("SimConfig: band_policy must be preset or fixed");
    if (nu_max_hz < 0) throw std::invalid_argument("SimConfig: nu_max must be >= 0");
    if (snr_db_list.empty()) throw std::invalid_argument("SimConfig: empty SNR list");
    if (trials < 1 || min_trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
    if (threads < 1) throw std::invalid_argument("SimConfig: threads must be >= 1");
    if (eps <= 0 || max_iter < 1) throw std::invalid_argument("SimConfig: bad equalizer settings");
    if (estimation == EstimationMode::SpreadPilot) {
      if (pdr_db_list.empty())
        throw std::invalid_argument("SimConfig: spread-pilot estimation needs a PDR list");
      if (turbo_list.empty())
        throw std::invalid_argument("SimConfig: spread-pilot estimation needs a turbo list");
      for (int t : turbo_list)
        if (t < 0) throw std::invalid_argument("SimConfig: turbo counts must be >= 0");
    }
    (void)band();
  }
};

// ---- JSON (de)serialization -------------------------------------------------

inline PulseKind pulse_kind_from_string(const std::string& s) {
  if (s == "sinc") return PulseKind::Sinc;
  if (s == "rrc") return PulseKind::Rrc;
  if (s == "gauss") return PulseKind::Gauss;
  if (s == "gauss-sinc") return PulseKind::GaussSinc;
  throw std::invalid_argument("unknown pulse kind: " + s);
}

inline const char* pulse_kind_name(PulseKind k) {
  switch (k) {
    case PulseKind::Sinc: return "sinc";
    case PulseKind::Rrc: return "rrc";
    case PulseKind::Gauss: return "gauss";
    case PulseKind::GaussSinc: return "gauss-sinc";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "zak-dd") return Scheme::ZakDd;
  if (s == "zak-fd-cgm") return Scheme::ZakFdCgm;
  if (s == "fd-mount") return Scheme::FdMount;
  if (s == "cp-ofdm-genie") return Scheme::CpOfdmGenie;
  if (s == "cp-ofdm-1tap") return Scheme::CpOfdmOneTap;
  throw std::invalid_argument("unknown scheme: " + s);
}

inline SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid = GridParams(g.value("M", 31), g.value("N", 37), g.value("nu_p_hz", 30000.0));
  }
  if (j.contains("channel")) {
    const auto& ch = j.at("channel");
    c.channel_model = ch.value("model", c.channel_model);
    c.nu_max_hz = ch.value("nu_max_hz", c.nu_max_hz);
  }
  if (j.contains("pulse")) {
    const auto& p = j.at("pulse");
    const PulseKind kind = pulse_kind_from_string(p.value("kind", "rrc"));
    switch (kind) {
      case PulseKind::Sinc: c.pulse = PulseShape::sinc(); break;
      case PulseKind::Rrc:
        c.pulse = PulseShape::rrc(p.value("beta_tau", 0.6), p.value("beta_nu", 0.6));
        break;
      case PulseKind::Gauss:
        c.pulse = PulseShape::gauss(p.value("alpha_tau", 1.584), p.value("alpha_nu", 1.584));
        break;
      case PulseKind::GaussSinc:
        c.pulse = PulseShape::gauss_sinc(p.value("alpha_tau", 0.044), p.value("alpha_nu", 0.044));
        break;
    }
  }
  if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  if (j.contains("equalizer")) {
    const auto& e = j.at("equalizer");
    c.band_policy = e.value("band_policy", c.band_policy);
    c.b_fixed = e.value("b", c.b_fixed);
    c.eps = e.value("eps", c.eps);
    c.max_iter = e.value("max_iter", c.max_iter);
  }
  if (j.contains("estimation")) {
    const auto& e = j.at("estimation");
    const std::string mode = e.value("mode", "perfect");
    if (mode == "perfect")
      c.estimation = EstimationMode::Perfect;
    else if (mode == "spread-pilot")
      c.estimation = EstimationMode::SpreadPilot;
    else
      throw std::invalid_argument("unknown estimation mode: " + mode);
    c.zc_root = e.value("zc_root", c.zc_root);
    if (e.contains("pdr_db")) c.pdr_db_list = e.at("pdr_db").get<std::vector<double>>();
    if (e.contains("n_turbo")) c.turbo_list = e.at("n_turbo").get<std::vector<int>>();
    c.est_delay_guard = e.value("delay_guard", c.est_delay_guard);
  }
  if (j.contains("baselines")) c.ofdm_cp_len = j.at("baselines").value("cp_len", c.ofdm_cp_len);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("snr_db")) c.snr_db_list = s.at("snr_db").get<std::vector<double>>();
    c.trials = s.value("trials", c.trials);
    c.min_trials = s.value("min_trials", c.min_trials);
    c.target_errors = s.value("target_errors", c.target_errors);
    c.master_seed = s.value("master_seed", c.master_seed);
    c.threads = s.value("threads", c.threads);
  }
  if (j.contains("output")) c.out_dir = j.at("output").value("dir", c.out_dir);
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const SimConfig& c) {
  nlohmann::json j;
  j["grid"] = {{"M", c.grid.M}, {"N", c.grid.N}, {"nu_p_hz", c.grid.nu_p}};
  j["channel"] = {{"model", c.channel_model}, {"nu_max_hz", c.nu_max_hz}};
  j["pulse"] = {{"kind", pulse_kind_name(c.pulse.kind)},
                {"beta_tau", c.pulse.beta_tau},
                {"beta_nu", c.pulse.beta_nu},
                {"alpha_tau", c.pulse.alpha_tau},
                {"alpha_nu", c.pulse.alpha_nu}};
  j["scheme"] = scheme_name(c.scheme);
  j["equalizer"] = {{"band_policy", c.band_policy},
                    {"b", c.b_fixed},
                    {"eps", c.eps},
                    {"max_iter", c.max_iter}};
  j["estimation"] = {
      {"mode", c.estimation == EstimationMode::Perfect ? "perfect" : "spread-pilot"},
      {"zc_root", c.zc_root},
      {"pdr_db", c.pdr_db_list},
      {"n_turbo", c.turbo_list},
      {"delay_guard", c.est_delay_guard}};
  j["baselines"] = {{"cp_len", c.ofdm_cp_len}};
  j["sweep"] = {{"snr_db", c.snr_db_list}, {"trials", c.trials},
                {"min_trials", c.min_trials}, {"target_errors", c.target_errors},
                {"master_seed", c.master_seed}, {"threads", c.threads}};
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

/// FNV-1a 64 over the canonical config JSON.
inline std::string config_fingerprint(const SimConfig& c) {
  const std::string dump = config_to_json(c).dump();
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- Trial execution --------------------------------------------------------

struct TrialResult {
  std::string fingerprint;
  uint64_t seed = 0;
  double snr_db = 0;
  double pdr_db = std::numeric_limits<double>::quiet_NaN();
  int turbo = -1;  // -1 = perfect CSI
  int64_t bit_errors = 0;
  int64_t bits_total = 0;
  double nmse = std::numeric_limits<double>::quiet_NaN();
  int cgm_iterations = 0;
  double wall_time_s = 0;
};

struct PointSpec {
  int index = 0;
  double snr_db = 0;
  double pdr_db = std::numeric_limits<double>::quiet_NaN();
  int turbo = -1;
};

struct PointResult {
  PointSpec spec;
  std::vector<TrialResult> trials;

  int64_t total_errors() const {
    int64_t e = 0;
    for (const auto& t : trials) e += t.bit_errors;
    return e;
  }
  int64_t total_bits() const {
    int64_t b = 0;
    for (const auto& t : trials) b += t.bits_total;
    return b;
  }
  double ber() const {
    const int64_t b = total_bits();
    return b ? static_cast<double>(total_errors()) / static_cast<double>(b) : 0.0;
  }
  // Normal-approximation 95% half-width on the BER estimate.
  double ber_ci95() const {
    const int64_t b = total_bits();
    if (!b) return 0.0;
    const double p = ber();
    return 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(b));
  }
  double median_nmse() const {
    std::vector<double> v;
    for (const auto& t : trials)
      if (!std::isnan(t.nmse)) v.push_back(t.nmse);
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
};

struct SweepResult {
  SimConfig config;
  std::vector<PointResult> points;
};

/// Shared per-sweep precomputations (independent of the trial index).
struct SweepContext {
  Mat R;               // dense IDFZT matrix
  NullSpaceMask mask;  // for the configured band
  SpreadPilot pilot;   // spread-pilot runs only
  Constellation constellation = Constellation::qam4();
  int b = 0;
  int est_k_max = 0;
  int est_l_max = 0;

  static SweepContext build(const SimConfig& cfg) {
    SweepContext ctx;
    ctx.b = cfg.band();
    const bool needs_mask = cfg.scheme == Scheme::ZakFdCgm;
    if (needs_mask || cfg.scheme == Scheme::ZakDd || cfg.scheme == Scheme::FdMount) {
      ctx.R = build_R(cfg.grid);
      if (needs_mask) ctx.mask = build_mask(cfg.grid, ctx.R, ctx.b);
    }
    if (cfg.estimation == EstimationMode::SpreadPilot) {
      ctx.pilot = make_pilot(cfg.grid, cfg.zc_root);
      const double tau_max = veh_a_profile().back().first * 1e-6;
      ctx.est_k_max = std::min(
          cfg.grid.M - 1,
          static_cast<int>(std::ceil(tau_max * cfg.grid.bandwidth())) + cfg.est_delay_guard);
      // Doppler crop defaults to the band preset, capped so the window spans
      // at most one Doppler period (the cross-ambiguity is N-periodic in l).
      ctx.est_l_max = std::min(ctx.b, (cfg.grid.N - 1) / 2);
    }
    return ctx;
  }
};

inline int64_t count_bit_errors(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("count_bit_errors: size mismatch");
  int64_t e = 0;
  for (size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]) ? 1 : 0;
  return e;
}

/// Run one Monte-Carlo trial of the configured scheme.
inline TrialResult run_trial(const SimConfig& cfg, const SweepContext& ctx, const PointSpec& pt,
                             int trial_idx) {
  const auto t_start = std::chrono::steady_clock::now();
  TrialResult res;
  res.snr_db = pt.snr_db;
  res.pdr_db = pt.pdr_db;
  res.turbo = pt.turbo;
  res.seed = derive_seed(cfg.master_seed, pt.index + 1, trial_idx + 1, 0);

  RngStream noise_rng(derive_seed(cfg.master_seed, pt.index + 1, trial_idx + 1, 1));
  RngStream data_rng(derive_seed(cfg.master_seed, pt.index + 1, trial_idx + 1, 2));

  // Channel realization: shared across schemes for a given (point, trial).
  const PathSet paths = veh_a_paths(cfg.nu_max_hz, res.seed);
  const EffectiveChannel h_eff = effective_channel(paths, cfg.pulse, cfg.grid);
  const PeriodizedChannel per = periodize(h_eff);
  const FdChannelOperator op(per);

  const NoiseModel noise{std::pow(10.0, -pt.snr_db / 10.0)};
  const Constellation& qam = ctx.constellation;
  const int mn = cfg.grid.frame_size();

  switch (cfg.scheme) {
    case Scheme::ZakFdCgm: {
      const Eigen::Index n_sym = ctx.mask.Nmat.cols();
      const auto tx_bits = data_rng.random_bits(n_sym * qam.bits_per_symbol);
      const Vec x_prime = qam_map(tx_bits, qam);

      if (cfg.estimation == EstimationMode::Perfect) {
        const Vec s_prime = mask_encode(x_prime, ctx.R, ctx.mask);
        const Vec r = apply_channel(op, s_prime, noise, noise_rng);
        const BandedMatrix band = extract_band(op, ctx.b);
        CgmResult cg = cgm_equalize(band, r, noise, cfg.eps, cfg.max_iter);
        res.cgm_iterations = cg.iterations;
        const Vec detected = detect(cg.solution, ctx.mask, qam);
        res.bit_errors = count_bit_errors(tx_bits, qam_demap(detected, qam));
        res.bits_total = static_cast<int64_t>(tx_bits.size());
      } else {
        const PowerSplit split = PowerSplit::from_pdr_db(pt.pdr_db);
        const Vec tx_dd = superimpose(ctx.mask.Nmat * x_prime, ctx.pilot, split);
        const Vec s_tx = idfzt(DDFrame::from_vec(cfg.grid, tx_dd)).s;
        const Vec r = apply_channel(op, s_tx, noise, noise_rng);
        const Vec y_dd = dfzt(FDVector(cfg.grid, r)).vec();

        TurboConfig tc;
        tc.k_max = ctx.est_k_max;
        tc.l_max = ctx.est_l_max;
        tc.b = ctx.b;
        tc.eps = cfg.eps;
        tc.max_iter = cfg.max_iter;
        tc.n_turbo = pt.turbo;
        const TurboResult tr =
            turbo_estimate(y_dd, ctx.pilot, split, noise, ctx.mask, qam, tc, &h_eff);
        res.cgm_iterations = tr.cgm_iterations;
        res.nmse = tr.nmse_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : tr.nmse_trace.back();
        res.bit_errors = count_bit_errors(tx_bits, qam_demap(tr.x_hat, qam));
        res.bits_total = static_cast<int64_t>(tx_bits.size());
      }
      break;
    }
    case Scheme::ZakDd: {
      const auto tx_bits = data_rng.random_bits(static_cast<size_t>(mn) * qam.bits_per_symbol);
      const Vec x_dd = qam_map(tx_bits, qam);
      const Vec s = idfzt(DDFrame::from_vec(cfg.grid, x_dd)).s;
      const Vec r = apply_channel(op, s, noise, noise_rng);
      const Vec s_eq = lmmse_structured(op, r, noise);
      const Vec x_eq = dfzt(FDVector(cfg.grid, s_eq)).vec();
      Vec hard(mn);
      for (int i = 0; i < mn; ++i) hard[i] = qam.points[qam.decide(x_eq[i])];
      res.bit_errors = count_bit_errors(tx_bits, qam_demap(hard, qam));
      res.bits_total = static_cast<int64_t>(tx_bits.size());
      break;
    }
    case Scheme::FdMount: {
      const auto tx_bits = data_rng.random_bits(static_cast<size_t>(mn) * qam.bits_per_symbol);
      const Vec x = qam_map(tx_bits, qam);
      const Vec r = fd_mount_transmit(x, op, noise, noise_rng);
      const Vec eq = lmmse_structured(op, r, noise);
      Vec hard(mn);
      for (int i = 0; i < mn; ++i) hard[i] = qam.points[qam.decide(eq[i])];
      res.bit_errors = count_bit_errors(tx_bits, qam_demap(hard, qam));
      res.bits_total = static_cast<int64_t>(tx_bits.size());
      break;
    }
    case Scheme::CpOfdmGenie:
    case Scheme::CpOfdmOneTap: {
      const OfdmConfig ocfg = OfdmConfig::for_grid(cfg.grid, cfg.ofdm_cp_len);
      const auto tx_bits = data_rng.random_bits(static_cast<size_t>(mn) * qam.bits_per_symbol);
      const Receiver rx =
          cfg.scheme == Scheme::CpOfdmGenie ? Receiver::Genie : Receiver::OneTap;
      const auto rx_bits = ofdm_transceive(tx_bits, per, rx, noise, noise_rng, ocfg, qam);
      res.bit_errors = count_bit_errors(tx_bits, rx_bits);
      res.bits_total = static_cast<int64_t>(tx_bits.size());
      break;
    }
  }

  res.fingerprint = config_fingerprint(cfg);
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

/// Expand the configured sweep into points (SNR x PDR x turbo for estimation runs).
inline std::vector<PointSpec> sweep_points(const SimConfig& cfg) {
  std::vector<PointSpec> pts;
  int idx = 0;
  for (double snr : cfg.snr_db_list) {
    if (cfg.estimation == EstimationMode::Perfect) {
      pts.push_back({idx++, snr, std::numeric_limits<double>::quiet_NaN(), -1});
    } else {
      for (double pdr : cfg.pdr_db_list)
        for (int turbo : cfg.turbo_list) pts.push_back({idx++, snr, pdr, turbo});
    }
  }
  return pts;
}

/**
 * Run the full sweep. With target_errors == 0 all trials run (optionally on
 * a thread pool, results merged by trial index). With target_errors > 0
 * each point stops early once the error count is reached (serial, still
 * deterministic).
 */
inline SweepResult run_sweep(const SimConfig& cfg) {
  cfg.validate();
  const SweepContext ctx = SweepContext::build(cfg);
  SweepResult out;
  out.config = cfg;

  for (const PointSpec& pt : sweep_points(cfg)) {
    PointResult pr;
    pr.spec = pt;
    if (cfg.target_errors > 0 || cfg.threads == 1) {
      int64_t errors = 0;
      for (int t = 0; t < cfg.trials; ++t) {
        pr.trials.push_back(run_trial(cfg, ctx, pt, t));
        errors += pr.trials.back().bit_errors;
        if (cfg.target_errors > 0 && t + 1 >= cfg.min_trials && errors >= cfg.target_errors)
          break;
      }
    } else {
      pr.trials.resize(cfg.trials);
      std::atomic<int> next{0};
      auto worker = [&] {
        for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1))
          pr.trials[t] = run_trial(cfg, ctx, pt, t);
      };
      std::vector<std::thread> pool;
      for (int w = 0; w < cfg.threads; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    out.points.push_back(std::move(pr));
  }
  return out;
}

// ---- Result emission --------------------------------------------------------

namespace detail {
inline std::string fmt(double v) {
  char buf[40];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/**
 * Write trials.csv (one row per trial), curves.csv (one row per point) and
 * manifest.txt (full config + seeds). Emission is byte-stable for a fixed
 * result set.
 */
inline void emit_results(const SweepResult& res, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw std::runtime_error("emit_results: cannot create output directory " + out_dir);

  const std::string prefix = out_dir + "/" + scheme_name(res.config.scheme);
  {
    std::ofstream out(prefix + "_trials.csv");
    out << "scheme,point,trial,seed,snr_db,pdr_db,turbo,bit_errors,bits_total,nmse,"
           "cgm_iterations,wall_time_s\n";
    for (const auto& pt : res.points) {
      for (size_t t = 0; t < pt.trials.size(); ++t) {
        const auto& tr = pt.trials[t];
        out << scheme_name(res.config.scheme) << ',' << pt.spec.index << ',' << t << ','
            << tr.seed << ',' << detail::fmt(tr.snr_db) << ',' << detail::fmt(tr.pdr_db) << ','
            << tr.turbo << ',' << tr.bit_errors << ',' << tr.bits_total << ','
            << detail::fmt(tr.nmse) << ',' << tr.cgm_iterations << ','
            << detail::fmt(tr.wall_time_s) << '\n';
      }
    }
  }
  {
    std::ofstream out(prefix + "_curves.csv");
    out << "scheme,snr_db,pdr_db,turbo,trials,bits_total,bit_errors,ber,ber_ci95,median_nmse\n";
    for (const auto& pt : res.points) {
      out << scheme_name(res.config.scheme) << ',' << detail::fmt(pt.spec.snr_db) << ','
          << detail::fmt(pt.spec.pdr_db) << ',' << pt.spec.turbo << ',' << pt.trials.size() << ','
          << pt.total_bits() << ',' << pt.total_errors() << ',' << detail::fmt(pt.ber()) << ','
          << detail::fmt(pt.ber_ci95()) << ',' << detail::fmt(pt.median_nmse()) << '\n';
    }
  }
  {
    std::ofstream out(prefix + "_manifest.txt");
    out << "fingerprint: " << config_fingerprint(res.config) << "\n";
    out << "master_seed: " << res.config.master_seed << "\n";
    out << "config: " << config_to_json(res.config).dump(2) << "\n";
    out << "points:\n";
    for (const auto& pt : res.points)
      out << "  point " << pt.spec.index << ": snr_db=" << detail::fmt(pt.spec.snr_db)
          << " pdr_db=" << detail::fmt(pt.spec.pdr_db) << " turbo=" << pt.spec.turbo
          << " trials=" << pt.trials.size() << "\n";
  }
}

// ---- Complexity benchmark ---------------------------------------------------

struct BenchRow {
  int M = 0, N = 0;
  int frame_size = 0;
  double cgm_seconds = 0;
  double dense_seconds = std::numeric_limits<double>::quiet_NaN();
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double cgm_slope = 0;    // log-log fit of CGM time vs MN
  double dense_slope = 0;  // log-log fit of dense LMMSE time vs MN
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/**
 * Time the banded CGM (fixed b and iteration count) across grids, and the
 * dense LMMSE oracle on the grids small enough to materialize. Each timing
 * is the median of `reps` runs; CGM runs are batched until they exceed a
 * minimum measurable duration.
 */
inline BenchResult bench_complexity(const std::vector<GridParams>& grids, int b, int k,
                                    uint64_t seed = 7, int reps = 5,
                                    int dense_limit = kDenseCap) {
  using clock = std::chrono::steady_clock;
  BenchResult out;
  std::vector<double> mn_cgm, t_cgm, mn_dense, t_dense;

  for (const auto& grid : grids) {
    BenchRow row;
    row.M = grid.M;
    row.N = grid.N;
    row.frame_size = grid.frame_size();

    const PathSet paths = veh_a_paths(815.0, seed);
    EffectiveChannelOptions opt;
    opt.l_max = std::min(b, (grid.N - 1) / 2);
    const PeriodizedChannel per =
        periodize(effective_channel(paths, PulseShape::rrc(0.6, 0.6), grid, opt));
    const FdChannelOperator op(per);
    const BandedMatrix band = extract_band(op, b);

    RngStream rng(derive_seed(seed, grid.frame_size()));
    const Vec r = rng.cnormal_vec(grid.frame_size(), 1.0);
    const NoiseModel noise{0.01};

    // Batch until the measurement is comfortably above timer resolution.
    int batch = 1;
    for (;;) {
      const auto t0 = clock::now();
      for (int i = 0; i < batch; ++i)
        cgm_equalize(band, r, noise, /*eps=*/0.0, /*max_iter=*/k);
      const double dt = std::chrono::duration<double>(clock::now() - t0).count();
      if (dt > 0.05 || batch > 4096) break;
      batch *= 2;
    }
    std::vector<double> samples;
    for (int rep = 0; rep < reps; ++rep) {
      const auto t0 = clock::now();
      for (int i = 0; i < batch; ++i)
        cgm_equalize(band, r, noise, /*eps=*/0.0, /*max_iter=*/k);
      samples.push_back(std::chrono::duration<double>(clock::now() - t0).count() / batch);
    }
    std::sort(samples.begin(), samples.end());
    row.cgm_seconds = samples[samples.size() / 2];
    mn_cgm.push_back(row.frame_size);
    t_cgm.push_back(row.cgm_seconds);

    if (grid.frame_size() <= dense_limit) {
      const Mat H = op.dense(dense_limit);
      std::vector<double> dsamples;
      for (int rep = 0; rep < reps; ++rep) {
        const auto t0 = clock::now();
        lmmse_direct(H, r, noise);
        dsamples.push_back(std::chrono::duration<double>(clock::now() - t0).count());
      }
      std::sort(dsamples.begin(), dsamples.end());
      row.dense_seconds = dsamples[dsamples.size() / 2];
      mn_dense.push_back(row.frame_size);
      t_dense.push_back(row.dense_seconds);
    }
    out.rows.push_back(row);
  }
  if (mn_cgm.size() >= 2) out.cgm_slope = loglog_slope(mn_cgm, t_cgm);
  if (mn_dense.size() >= 2) out.dense_slope = loglog_slope(mn_dense, t_dense);
  return out;
}

}  // namespace zakotfs
