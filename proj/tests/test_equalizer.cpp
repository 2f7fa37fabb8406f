// Masking, banded storage, CGM/LMMSE equalization and detection tests.

#include "zakotfs/equalizer.hpp"
#include "zakotfs/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace zakotfs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

BandedMatrix random_banded(Eigen::Index n, int b, RngStream& rng, double scale) {
  BandedMatrix m(n, b);
  for (Eigen::Index f = 0; f < n; ++f)
    for (Eigen::Index i = std::max<Eigen::Index>(0, f - b);
         i <= std::min<Eigen::Index>(n - 1, f + b); ++i)
      m.set(f, i, rng.cnormal(scale));
  return m;
}

}  // namespace

TEST_CASE("build_mask: b=0 identity, dimensions, orthonormality, null property") {
  const GridParams g(3, 5, 30000.0);
  const Mat R = build_R(g);

  const NullSpaceMask id_mask = build_mask(g, R, 0);
  CHECK((id_mask.Nmat - Mat::Identity(15, 15)).cwiseAbs().maxCoeff() == 0.0);

  const int b = 2;
  const NullSpaceMask mask = build_mask(g, R, b);
  REQUIRE(mask.Nmat.rows() == 15);
  REQUIRE(mask.Nmat.cols() == 11);  // MN - 2b

  Mat Rp(2 * b, 15);
  Rp.topRows(b) = R.topRows(b);
  Rp.bottomRows(b) = R.bottomRows(b);
  CHECK((Rp * mask.Nmat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((mask.Nmat.adjoint() * mask.Nmat - Mat::Identity(11, 11)).cwiseAbs().maxCoeff() < 1e-10);

  // Deterministic: rebuilding gives the identical basis.
  const NullSpaceMask mask2 = build_mask(g, R, b);
  CHECK((mask.Nmat - mask2.Nmat).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(build_mask(g, R, 8), std::invalid_argument);  // 2b >= MN
}

TEST_CASE("mask_encode: zero FD edges, energy preservation, zero input") {
  const GridParams g(3, 5, 30000.0);
  const Mat R = build_R(g);
  const int b = 2;
  const NullSpaceMask mask = build_mask(g, R, b);
  RngStream rng(5);

  for (int probe = 0; probe < 5; ++probe) {
    Vec x(11);
    for (int i = 0; i < 11; ++i) x[i] = rng.cnormal(1.0);
    const Vec sp = mask_encode(x, R, mask);
    CHECK(sp.head(b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sp.tail(b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THAT(sp.norm(), WithinAbs(x.norm(), 1e-12));
  }
  CHECK(mask_encode(Vec::Zero(11), R, mask).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(mask_encode(Vec::Zero(10), R, mask), std::invalid_argument);
}

TEST_CASE("extract_band: identity, full band, banded product vs dense") {
  const Mat I9 = Mat::Identity(9, 9);
  const BandedMatrix bi = extract_band(I9, 2);
  CHECK((bi.dense() - I9).cwiseAbs().maxCoeff() == 0.0);

  RngStream rng(6);
  Mat A(9, 9);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) A(r, c) = rng.cnormal(1.0);
  const Vec x = rng.cnormal_vec(9, 1.0);
  // Full band reproduces the dense product for arbitrary input.
  const BandedMatrix full = extract_band(A, 8);
  CHECK((full.multiply(x) - A * x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((full.multiply_adjoint(x) - A.adjoint() * x).cwiseAbs().maxCoeff() < 1e-12);

  // Banded mat-vec equals dense mat-vec restricted to the band.
  const BandedMatrix part = extract_band(A, 3);
  CHECK((part.multiply(x) - part.dense() * x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((part.multiply_adjoint(x) - part.dense().adjoint() * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("masked inputs: dense channel application equals banded application") {
  // Band-limited channel (Doppler support within b), so the folded corners
  // only ever multiply the masked zeros.
  const GridParams g(3, 5, 30000.0);
  const int b = 2;
  RngStream rng(8);
  EffectiveChannel h(g, 2, b);
  for (int k = 0; k <= 2; ++k)
    for (int l = -b; l <= b; ++l) h.at(k, l) = rng.cnormal(1.0);
  const FdChannelOperator op(periodize(h));
  const Mat H = op.dense();
  const BandedMatrix band = extract_band(op, b);

  const Mat R = build_R(g);
  const NullSpaceMask mask = build_mask(g, R, b);
  for (int probe = 0; probe < 5; ++probe) {
    Vec x(mask.Nmat.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.cnormal(1.0);
    const Vec sp = mask_encode(x, R, mask);
    CHECK((H * sp - band.multiply(sp)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("apply_channel: zero-noise exactness, noise energy, reproducibility") {
  RngStream rng(10);
  const Mat H = Mat::Identity(16, 16) * cxd(0.5, 0.25);
  const Vec s = rng.cnormal_vec(16, 1.0);

  RngStream noise_a(77);
  const Vec clean = apply_channel(H, s, NoiseModel{0.0}, noise_a);
  CHECK((clean - H * s).cwiseAbs().maxCoeff() == 0.0);

  // E[ ||w||^2 ] = n * sigma^2 over many draws.
  const double sigma2 = 0.35;
  double acc = 0;
  const int draws = 10000;
  RngStream noise_b(78);
  for (int d = 0; d < draws; ++d) acc += noise_b.cnormal_vec(16, sigma2).squaredNorm();
  CHECK_THAT(acc / draws, WithinRel(16 * sigma2, 0.05));

  RngStream n1(79), n2(79);
  const Vec r1 = apply_channel(H, s, NoiseModel{sigma2}, n1);
  const Vec r2 = apply_channel(H, s, NoiseModel{sigma2}, n2);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lmmse_direct: identity-channel closed forms and two-form agreement") {
  const int n = 20;
  const Mat I = Mat::Identity(n, n);
  RngStream rng(12);
  const Vec r = rng.cnormal_vec(n, 1.0);

  // H = I, sigma^2 = 1: output r/2.
  CHECK((lmmse_direct(I, r, NoiseModel{1.0}) - 0.5 * r).cwiseAbs().maxCoeff() < 1e-12);
  // sigma^2 -> 0: output -> r.
  CHECK((lmmse_direct(I, r, NoiseModel{1e-12}) - r).cwiseAbs().maxCoeff() < 1e-9);

  // (sigma^2 I + H^H H)^-1 H^H r  ==  H^H (H H^H + sigma^2 I)^-1 r.
  for (int probe = 0; probe < 5; ++probe) {
    Mat H(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) H(a, c) = rng.cnormal(1.0 / n);
    const double sigma2 = 0.2;
    const Vec direct = lmmse_direct(H, r, NoiseModel{sigma2});
    Mat Kr = H * H.adjoint();
    Kr.diagonal().array() += sigma2;
    const Vec alt = H.adjoint() * Kr.llt().solve(r);
    CHECK((direct - alt).norm() / alt.norm() < 1e-8);
  }
}

TEST_CASE("lmmse_structured matches lmmse_direct on a real channel") {
  const GridParams g(3, 5, 30000.0);
  const PeriodizedChannel per =
      periodize(effective_channel(veh_a_paths(815.0, 19), PulseShape::rrc(0.6, 0.6), g));
  const FdChannelOperator op(per);
  RngStream rng(20);
  const Vec r = rng.cnormal_vec(g.frame_size(), 1.0);
  const NoiseModel noise{0.05};
  const Vec a = lmmse_direct(op.dense(), r, noise);
  const Vec b = lmmse_structured(op, r, noise);
  CHECK((a - b).norm() / a.norm() < 1e-10);
}

TEST_CASE("cgm_equalize: one-step identity case") {
  const int n = 8;
  BandedMatrix I(n, 0);
  for (int i = 0; i < n; ++i) I.set(i, i, 1.0);
  Vec e1 = Vec::Zero(n);
  e1[0] = 1.0;
  const CgmResult res = cgm_equalize(I, e1, NoiseModel{1.0}, 1e-6, 250);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK((res.solution - 0.5 * e1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cgm_equalize: matches dense LMMSE oracle on MN=155 banded system") {
  const int n = 155;  // M=31, N=5
  const int b = 3;
  RngStream rng(42);
  const BandedMatrix H = random_banded(n, b, rng, 1.0 / (2 * b + 1));
  const Vec r = rng.cnormal_vec(n, 1.0);
  const NoiseModel noise{1.0};

  const CgmResult cg = cgm_equalize(H, r, noise, 1e-6, 250);
  const Vec oracle = lmmse_direct(H.dense(), r, noise);
  CHECK(cg.converged);
  CHECK(cg.iterations <= 250);
  CHECK((cg.solution - oracle).norm() / oracle.norm() < 1e-5);
}

TEST_CASE("cgm_equalize: finite termination and monotone residual") {
  RngStream rng(43);
  for (int n : {16, 32, 64}) {
    const BandedMatrix H = random_banded(n, 2, rng, 0.2);
    const Vec r = rng.cnormal_vec(n, 1.0);
    const CgmResult res = cgm_equalize(H, r, NoiseModel{0.5}, 1e-10, n + 1);
    CHECK(res.converged);
    CHECK(res.iterations <= n);
    for (size_t i = 1; i < res.residual_trace.size(); ++i)
      CHECK(res.residual_trace[i] <= res.residual_trace[i - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("cgm_equalize: non-convergence returns flag and best iterate") {
  RngStream rng(44);
  const BandedMatrix H = random_banded(64, 2, rng, 0.2);
  const Vec r = rng.cnormal_vec(64, 1.0);
  const CgmResult res = cgm_equalize(H, r, NoiseModel{0.01}, 1e-14, 2);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 2);
  CHECK(res.solution.allFinite());
  CHECK_THROWS_AS(cgm_equalize(H, r, NoiseModel{0.0}, 1e-6, 10), std::invalid_argument);
}

TEST_CASE("detect: noiseless recovery, perturbation bound, tie rule, count") {
  const GridParams g(3, 5, 30000.0);
  const Mat R = build_R(g);
  const int b = 2;
  const NullSpaceMask mask = build_mask(g, R, b);
  const Constellation qam = Constellation::qam4();
  RngStream rng(50);

  Vec x(mask.Nmat.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = qam.points[rng.uniform_int(qam.points.size())];

  const Vec s = mask_encode(x, R, mask);
  const Vec detected = detect(s, mask, qam);
  REQUIRE(detected.size() == g.frame_size() - 2 * b);  // exactly MN - 2b symbols
  CHECK((detected - x).cwiseAbs().maxCoeff() < 1e-12);

  // Perturbations below half the minimum distance cannot flip a decision.
  Vec eps(x.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i)
    eps[i] = 0.45 * qam.min_distance() * cis(rng.uniform(0, 2 * kPi));
  const Vec s_pert = mask_encode(x + eps, R, mask);
  CHECK((detect(s_pert, mask, qam) - x).cwiseAbs().maxCoeff() < 1e-12);

  // Equidistant tie point resolves to the lowest constellation index.
  CHECK(qam.decide(cxd(1.0, 0.0)) == 0);  // between 00 and 01 -> index 0
  CHECK(qam.decide(cxd(0.0, 0.0)) == 0);  // equidistant to all four
}

TEST_CASE("end-to-end noiseless loopback at M=31, N=37 with preset band") {
  const GridParams g(31, 37, 30000.0);
  const PulseShape pulse = PulseShape::rrc(0.6, 0.6);
  const int b = band_preset(pulse.kind, 815.0, g);
  const Mat R = build_R(g);
  const NullSpaceMask mask = build_mask(g, R, b);
  const Constellation qam = Constellation::qam4();
  RngStream rng(60);

  const PeriodizedChannel per = periodize(effective_channel(veh_a_paths(815.0, 61), pulse, g));
  const FdChannelOperator op(per);
  const BandedMatrix band = extract_band(op, b);

  Vec x(mask.Nmat.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = qam.points[rng.uniform_int(qam.points.size())];

  RngStream noise_rng(62);
  const Vec r = apply_channel(op, mask_encode(x, R, mask), NoiseModel{0.0}, noise_rng);
  const CgmResult cg = cgm_equalize(band, r, NoiseModel{1e-10}, 1e-8, 500);
  const Vec detected = detect(cg.solution, mask, qam);
  CHECK((detected - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("residual trace CSV export") {
  BandedMatrix I(4, 0);
  for (int i = 0; i < 4; ++i) I.set(i, i, 1.0);
  Vec r = Vec::Ones(4);
  const CgmResult res = cgm_equalize(I, r, NoiseModel{1.0}, 1e-6, 10);
  const std::string path = "/tmp/zakotfs_residual_test.csv";
  write_residual_csv(res, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,c_norm");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(res.residual_trace.size()));
  std::remove(path.c_str());
}
