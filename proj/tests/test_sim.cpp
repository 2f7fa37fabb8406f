// Harness tests: config validation, determinism, aggregation, emission.

#include "zakotfs/sim.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace zakotfs;
using Catch::Matchers::WithinAbs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SimConfig small_config() {
  SimConfig cfg;
  cfg.grid = GridParams(7, 9, 30000.0);
  cfg.nu_max_hz = 400.0;
  cfg.pulse = PulseShape::rrc(0.6, 0.6);
  cfg.scheme = Scheme::ZakFdCgm;
  cfg.band_policy = "fixed";
  cfg.b_fixed = 2;
  cfg.snr_db_list = {15.0};
  cfg.trials = 3;
  cfg.master_seed = 555;
  cfg.out_dir = (std::filesystem::temp_directory_path() / "zakotfs_sim_test").string();
  return cfg;
}

}  // namespace

TEST_CASE("SimConfig validation rejects bad configs before any trial") {
  SimConfig cfg = small_config();
  cfg.channel_model = "epa";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.snr_db_list.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.estimation = EstimationMode::SpreadPilot;
  cfg.pdr_db_list.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.band_policy = "fixed";
  cfg.b_fixed = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  // JSON round trip preserves the configuration.
  cfg = small_config();
  const SimConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_fingerprint(back) == config_fingerprint(cfg));
}

TEST_CASE("zero-noise perfect-CSI zak-fd-cgm sweep has BER = 0") {
  SimConfig cfg = small_config();
  cfg.snr_db_list = {200.0};  // effectively noiseless
  cfg.trials = 2;
  const SweepResult res = run_sweep(cfg);
  REQUIRE(res.points.size() == 1);
  CHECK(res.points[0].total_errors() == 0);
  CHECK(res.points[0].total_bits() > 0);
}

TEST_CASE("same master seed reproduces the result set bit for bit") {
  SimConfig cfg = small_config();
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t p = 0; p < a.points.size(); ++p) {
    REQUIRE(a.points[p].trials.size() == b.points[p].trials.size());
    for (size_t t = 0; t < a.points[p].trials.size(); ++t) {
      CHECK(a.points[p].trials[t].seed == b.points[p].trials[t].seed);
      CHECK(a.points[p].trials[t].bit_errors == b.points[p].trials[t].bit_errors);
      CHECK(a.points[p].trials[t].bits_total == b.points[p].trials[t].bits_total);
    }
  }
}

TEST_CASE("zak-dd and zak-fd-cgm consume identical channel realizations") {
  // The channel seed derives from (master, point, trial) only, so the two
  // schemes differ purely in the equalizer.
  SimConfig cfg = small_config();
  SimConfig cfg_dd = cfg;
  cfg_dd.scheme = Scheme::ZakDd;
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg_dd);
  for (size_t t = 0; t < a.points[0].trials.size(); ++t)
    CHECK(a.points[0].trials[t].seed == b.points[0].trials[t].seed);
}

TEST_CASE("aggregation: BER equals the hand-computed ratio on a fixture") {
  PointResult pr;
  pr.spec = {0, 10.0, std::numeric_limits<double>::quiet_NaN(), -1};
  TrialResult t1, t2, t3;
  t1.bit_errors = 3;
  t1.bits_total = 100;
  t1.nmse = 0.5;
  t2.bit_errors = 0;
  t2.bits_total = 100;
  t2.nmse = 0.1;
  t3.bit_errors = 7;
  t3.bits_total = 100;
  t3.nmse = 0.3;
  pr.trials = {t1, t2, t3};
  CHECK_THAT(pr.ber(), WithinAbs(10.0 / 300.0, 1e-15));
  CHECK_THAT(pr.median_nmse(), WithinAbs(0.3, 1e-15));
}

TEST_CASE("emit_results: files are byte-stable; empty set gives header-only CSV") {
  SimConfig cfg = small_config();
  const std::string dir = cfg.out_dir;
  std::filesystem::remove_all(dir);

  SweepResult res = run_sweep(cfg);
  emit_results(res, dir);
  const std::string prefix = dir + "/" + scheme_name(cfg.scheme);
  const std::string trials_a = slurp(prefix + "_trials.csv");
  const std::string curves_a = slurp(prefix + "_curves.csv");
  const std::string manifest_a = slurp(prefix + "_manifest.txt");

  emit_results(res, dir);  // re-emit of identical results
  CHECK(slurp(prefix + "_trials.csv") == trials_a);
  CHECK(slurp(prefix + "_curves.csv") == curves_a);
  CHECK(slurp(prefix + "_manifest.txt") == manifest_a);

  // Statistical columns are reproducible across independent runs (wall
  // time is the one column that may differ).
  const SweepResult res2 = run_sweep(cfg);
  emit_results(res2, dir);
  const std::string curves_b = slurp(prefix + "_curves.csv");
  CHECK(curves_b == curves_a);

  // Empty result set: header-only files.
  SweepResult empty;
  empty.config = cfg;
  emit_results(empty, dir);
  CHECK(slurp(prefix + "_trials.csv") ==
        "scheme,point,trial,seed,snr_db,pdr_db,turbo,bit_errors,bits_total,nmse,"
        "cgm_iterations,wall_time_s\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("early stopping honors min_trials and the error target") {
  SimConfig cfg = small_config();
  cfg.snr_db_list = {-10.0};  // noisy: every trial produces errors
  cfg.trials = 50;
  cfg.min_trials = 4;
  cfg.target_errors = 1;
  const SweepResult res = run_sweep(cfg);
  CHECK(res.points[0].trials.size() == 4);  // stopped right after min_trials
  CHECK(res.points[0].total_errors() >= 1);
}

TEST_CASE("spread-pilot sweep points expand over PDR x turbo") {
  SimConfig cfg = small_config();
  cfg.estimation = EstimationMode::SpreadPilot;
  cfg.zc_root = 2;  // coprime with 63
  cfg.pdr_db_list = {25.0, 30.0};
  cfg.turbo_list = {0, 2};
  cfg.trials = 1;
  cfg.snr_db_list = {20.0};
  const auto pts = sweep_points(cfg);
  REQUIRE(pts.size() == 4);
  const SweepResult res = run_sweep(cfg);
  for (const auto& pt : res.points) {
    CHECK(pt.trials.size() == 1);
    CHECK(!std::isnan(pt.trials[0].nmse));
  }
  // Deeper turbo refinement does not worsen the estimate on this setup.
  CHECK(res.points[1].trials[0].nmse <= res.points[0].trials[0].nmse * 1.5);
}

TEST_CASE("bench_complexity produces timings and sane slopes on tiny grids") {
  const std::vector<GridParams> grids = {GridParams(7, 5, 30000.0), GridParams(7, 11, 30000.0),
                                         GridParams(7, 23, 30000.0)};
  const BenchResult res = bench_complexity(grids, 2, 40, 3, 3);
  REQUIRE(res.rows.size() == 3);
  for (const auto& row : res.rows) {
    CHECK(row.cgm_seconds > 0.0);
    CHECK(row.dense_seconds > 0.0);
  }
  CHECK(res.cgm_slope > 0.0);  // more work for bigger grids
}
