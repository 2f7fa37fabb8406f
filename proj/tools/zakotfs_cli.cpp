// zakotfs - command-line front end for the simulation library.
//
// Subcommands:
//   sweep    run a Monte-Carlo sweep from a JSON config file
//   bench    time banded-CGM vs dense-LMMSE equalization across grid sizes
//   fading   energy-per-carrier diagnostics (pulsone / DFT / CP-OFDM)
//   selftest run the oracle-equivalence checks
//
// See docs/formats.md for the config schema and CSV column layouts.

#include "zakotfs/sim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace zakotfs;

namespace {

int cmd_sweep(const std::string& config_path, const std::string& out_dir_override,
              int64_t seed_override, int trials_override) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot open config file: " << config_path << "\n";
    return 1;
  }
  nlohmann::json j;
  in >> j;
  SimConfig cfg = config_from_json(j);
  if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
  if (seed_override >= 0) cfg.master_seed = static_cast<uint64_t>(seed_override);
  if (trials_override > 0) cfg.trials = trials_override;
  cfg.validate();

  std::cout << "scheme " << scheme_name(cfg.scheme) << ", grid " << cfg.grid.M << "x" << cfg.grid.N
            << ", b=" << cfg.band() << ", seed " << cfg.master_seed << "\n";
  const SweepResult res = run_sweep(cfg);
  emit_results(res, cfg.out_dir);

  for (const auto& pt : res.points) {
    std::cout << "snr=" << pt.spec.snr_db << " dB";
    if (!std::isnan(pt.spec.pdr_db))
      std::cout << " pdr=" << pt.spec.pdr_db << " dB turbo=" << pt.spec.turbo;
    std::cout << "  trials=" << pt.trials.size() << "  ber=" << pt.ber();
    const double mn = pt.median_nmse();
    if (!std::isnan(mn)) std::cout << "  median_nmse=" << mn;
    std::cout << "\n";
  }
  std::cout << "results written to " << cfg.out_dir << "/\n";
  return 0;
}

int cmd_bench(const std::string& grids_arg, int b, int k, const std::string& out_dir) {
  std::vector<GridParams> grids;
  std::stringstream ss(grids_arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) {
      std::cerr << "bad grid spec '" << item << "' (expected MxN)\n";
      return 1;
    }
    grids.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)), 30000.0);
  }
  const BenchResult res = bench_complexity(grids, b, k);

  std::cout << "M\tN\tMN\tcgm_s\tdense_s\n";
  for (const auto& row : res.rows) {
    std::cout << row.M << '\t' << row.N << '\t' << row.frame_size << '\t' << row.cgm_seconds
              << '\t';
    if (std::isnan(row.dense_seconds))
      std::cout << "-";
    else
      std::cout << row.dense_seconds;
    std::cout << '\n';
  }
  std::cout << "cgm log-log slope vs MN:   " << res.cgm_slope << "\n";
  std::cout << "dense log-log slope vs MN: " << res.dense_slope << "\n";

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/bench.csv");
    csv << "M,N,frame_size,cgm_seconds,dense_seconds\n";
    for (const auto& row : res.rows)
      csv << row.M << ',' << row.N << ',' << row.frame_size << ',' << row.cgm_seconds << ','
          << row.dense_seconds << '\n';
    std::cout << "wrote " << out_dir << "/bench.csv\n";
  }
  return 0;
}

int cmd_fading(int seeds, double nu_max, const std::string& out_dir) {
  const GridParams grid(31, 37, 30000.0);
  const PulseShape pulse = PulseShape::rrc(0.6, 0.6);
  const OfdmConfig ocfg = OfdmConfig::for_grid(grid);

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir + "/fading.csv");
  csv << "seed,basis,spread_db\n";

  std::vector<double> sp_pulsone, sp_dft, sp_ofdm;
  for (int s = 0; s < seeds; ++s) {
    const PeriodizedChannel per =
        periodize(effective_channel(veh_a_paths(nu_max, 1000 + s), pulse, grid));
    const FdChannelOperator op(per);

    const RealVec e_dd = build_H_dd(per).H.colwise().squaredNorm().real().transpose();
    const RealVec e_fd = op.column_energies();
    const RealVec e_ofdm = energy_per_carrier(ofdm_frame_matrix(per, ocfg));

    sp_pulsone.push_back(energy_spread_db(e_dd));
    sp_dft.push_back(energy_spread_db(e_fd));
    sp_ofdm.push_back(energy_spread_db(e_ofdm));
    csv << s << ",pulsone," << sp_pulsone.back() << "\n";
    csv << s << ",dft," << sp_dft.back() << "\n";
    csv << s << ",cp-ofdm," << sp_ofdm.back() << "\n";
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  std::cout << "median energy-per-carrier spread (dB) over " << seeds << " seeds, nu_max=" << nu_max
            << " Hz:\n";
  std::cout << "  pulsone basis: " << median(sp_pulsone) << "\n";
  std::cout << "  DFT basis:     " << median(sp_dft) << "\n";
  std::cout << "  CP-OFDM:       " << median(sp_ofdm) << "\n";
  std::cout << "wrote " << out_dir << "/fading.csv\n";
  return 0;
}

int cmd_selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS  " : "FAIL  ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };
  char buf[128];

  {
    const GridParams g(31, 37, 30000.0);
    const Mat R = build_R(g);
    const double err =
        (R.adjoint() * R - Mat::Identity(g.frame_size(), g.frame_size())).cwiseAbs().maxCoeff();
    std::snprintf(buf, sizeof(buf), "max |R^H R - I| = %.3g", err);
    report("IDFZT unitarity (31x37)", err < 1e-12, buf);
  }
  {
    const GridParams g(3, 5, 30000.0);
    const PeriodizedChannel per =
        periodize(effective_channel(veh_a_paths(815.0, 42), PulseShape::rrc(0.6, 0.6), g));
    const Mat R = build_R(g);
    const Mat H = build_H_fd(per).H;
    const Mat Hdd = build_H_basis(per, BasisKind::Pulsone).H;
    const double err = (H - R * Hdd * R.adjoint()).cwiseAbs().maxCoeff() / H.cwiseAbs().maxCoeff();
    std::snprintf(buf, sizeof(buf), "rel err = %.3g", err);
    report("FD/DD unitary equivalence (3x5)", err < 1e-9, buf);
  }
  {
    const GridParams g(31, 5, 30000.0);
    RngStream rng(9);
    BandedMatrix band(g.frame_size(), 3);
    for (Eigen::Index f = 0; f < g.frame_size(); ++f)
      for (Eigen::Index i = std::max<Eigen::Index>(0, f - 3);
           i <= std::min<Eigen::Index>(g.frame_size() - 1, f + 3); ++i)
        band.set(f, i, rng.cnormal(1.0 / 7.0));
    const Vec r = rng.cnormal_vec(g.frame_size(), 1.0);
    const NoiseModel noise{1.0};
    const Vec direct = lmmse_direct(band.dense(), r, noise);
    const CgmResult cg = cgm_equalize(band, r, noise, 1e-6, 250);
    const double err = (cg.solution - direct).norm() / direct.norm();
    std::snprintf(buf, sizeof(buf), "rel err = %.3g, %d iters", err, cg.iterations);
    report("CGM vs dense LMMSE (MN=155, b=3)", err < 1e-5, buf);
  }
  {
    const GridParams g(31, 37, 30000.0);
    const Mat R = build_R(g);
    const NullSpaceMask mask = build_mask(g, R, 3);
    RngStream rng(17);
    Vec x(mask.Nmat.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.cnormal(1.0);
    const Vec sp = mask_encode(x, R, mask);
    const double edge = std::max(sp.head(3).cwiseAbs().maxCoeff(), sp.tail(3).cwiseAbs().maxCoeff());
    std::snprintf(buf, sizeof(buf), "max masked |s'| = %.3g", edge);
    report("null-space masking zeroes FD edges", edge < 1e-10, buf);
  }
  std::cout << (failures ? "selftest FAILED\n" : "selftest OK\n");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zak-OTFS frequency-domain equalization simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int64_t seed_override = -1;
  int trials_override = 0;
  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a config file");
  sweep->add_option("-c,--config", config_path, "JSON config file")->required();
  sweep->add_option("-o,--out", out_dir, "output directory override");
  sweep->add_option("--seed", seed_override, "master seed override");
  sweep->add_option("--trials", trials_override, "trials-per-point override");

  std::string grids = "31x5,31x11,31x37,31x149";
  int bench_b = 3, bench_k = 250;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "equalizer complexity-scaling benchmark");
  bench->add_option("--grids", grids, "comma-separated MxN grid list");
  bench->add_option("-b,--band", bench_b, "half-bandwidth");
  bench->add_option("-k,--iters", bench_k, "CGM iteration count");
  bench->add_option("-o,--out", bench_out, "output directory for bench.csv");

  int fading_seeds = 20;
  double fading_numax = 815.0;
  std::string fading_out = "out";
  auto* fading = app.add_subcommand("fading", "energy-per-carrier diagnostics");
  fading->add_option("--seeds", fading_seeds, "number of channel seeds");
  fading->add_option("--nu-max", fading_numax, "max Doppler in Hz");
  fading->add_option("-o,--out", fading_out, "output directory");

  auto* selftest = app.add_subcommand("selftest", "run oracle-equivalence checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seed_override, trials_override);
    if (bench->parsed()) return cmd_bench(grids, bench_b, bench_k, bench_out);
    if (fading->parsed()) return cmd_fading(fading_seeds, fading_numax, fading_out);
    if (selftest->parsed()) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
