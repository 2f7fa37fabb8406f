// Transform-layer tests: pulsones, IDFZT/DFZT, the R matrix and QAM I/O.

#include "zakotfs/rng.hpp"
#include "zakotfs/zak.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace zakotfs;
using Catch::Matchers::WithinAbs;

namespace {

DDFrame random_frame(const GridParams& g, RngStream& rng) {
  DDFrame f(g);
  for (int k = 0; k < g.M; ++k)
    for (int l = 0; l < g.N; ++l) f.X(k, l) = rng.cnormal(1.0);
  return f;
}

}  // namespace

TEST_CASE("GridParams derived quantities and validation") {
  GridParams g(31, 37, 30000.0);
  CHECK(g.tau_p() * g.nu_p == 1.0);
  CHECK(g.bandwidth() == Catch::Approx(930000.0));
  CHECK(g.duration() * g.bandwidth() == Catch::Approx(static_cast<double>(g.frame_size())));
  CHECK(g.frame_size() == 1147);
  CHECK_THROWS_AS(GridParams(0, 5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridParams(3, 5, 0.0), std::invalid_argument);
}

TEST_CASE("pulsone: fixed small-grid values") {
  GridParams g(2, 2, 1.0);
  const double a = 1.0 / std::sqrt(2.0);

  const Vec p00 = pulsone(g, 0, 0).x;
  CHECK_THAT(std::abs(p00[0] - cxd(a, 0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(p00[1]), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(p00[2] - cxd(a, 0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(p00[3]), WithinAbs(0.0, 1e-15));

  const Vec p11 = pulsone(g, 1, 1).x;
  CHECK_THAT(std::abs(p11[0]), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(p11[1] - cxd(a, 0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(p11[2]), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(p11[3] - cxd(-a, 0)), WithinAbs(0.0, 1e-15));

  CHECK_THROWS_AS(pulsone(g, 2, 0), std::out_of_range);
  CHECK_THROWS_AS(pulsone(g, 0, -1), std::out_of_range);
}

TEST_CASE("pulsone basis is orthonormal (brute-force Gram)") {
  GridParams g(3, 5, 1000.0);
  const int mn = g.frame_size();
  Mat P(mn, mn);
  for (int i = 0; i < mn; ++i) P.col(i) = pulsone(g, i % g.M, i / g.M).x;
  const Mat gram = P.adjoint() * P;
  CHECK((gram - Mat::Identity(mn, mn)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Identity 1: sum of Nth roots of unity") {
  const int N = 7;
  for (int i = 0; i < 3 * N; ++i) {
    for (int l0 = 0; l0 < N; ++l0) {
      cxd acc = 0.0;
      for (int d = 0; d < N; ++d) acc += cis(2.0 * kPi * d * (l0 - i) / N);
      const double expected = (floor_mod(l0 - i, N) == 0) ? N : 0.0;
      CHECK_THAT(std::abs(acc - cxd(expected, 0)), WithinAbs(0.0, 1e-10));
    }
  }
}

TEST_CASE("dd_to_td: delta frame reproduces the pulsone; linear; isometric") {
  GridParams g2(2, 2, 1.0);
  DDFrame delta(g2);
  delta.X(0, 0) = 1.0;
  CHECK((dd_to_td(delta).x - pulsone(g2, 0, 0).x).cwiseAbs().maxCoeff() < 1e-15);

  DDFrame zeros(g2);
  CHECK(dd_to_td(zeros).x.cwiseAbs().maxCoeff() == 0.0);

  GridParams g(3, 5, 1000.0);
  RngStream rng(11);
  const DDFrame f = random_frame(g, rng);
  const TDSignal x = dd_to_td(f);
  CHECK_THAT(x.x.squaredNorm(), WithinAbs(f.X.squaredNorm(), 1e-12));

  // Linearity on random probes.
  const DDFrame h = random_frame(g, rng);
  const cxd a(0.3, -1.2), b(-0.7, 0.4);
  DDFrame combo(g, a * f.X + b * h.X);
  const Vec lhs = dd_to_td(combo).x;
  const Vec rhs = a * dd_to_td(f).x + b * dd_to_td(h).x;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("idfzt: fixed values and matrix-route cross-check") {
  GridParams g2(2, 2, 1.0);
  DDFrame delta(g2);
  delta.X(0, 0) = 1.0;
  const Vec s = idfzt(delta).s;
  const double a = 1.0 / std::sqrt(2.0);
  CHECK_THAT(std::abs(s[0] - cxd(a, 0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(s[1]), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(s[2] - cxd(a, 0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(s[3]), WithinAbs(0.0, 1e-15));

  GridParams g1(1, 1, 1.0);
  DDFrame one(g1);
  one.X(0, 0) = cxd(0.5, -2.0);
  CHECK(idfzt(one).s[0] == one.X(0, 0));

  // Oracle: explicit R from the factored construction.
  GridParams g(3, 5, 1000.0);
  const Mat R = build_R(g);
  RngStream rng(3);
  for (int probe = 0; probe < 4; ++probe) {
    const DDFrame f = random_frame(g, rng);
    CHECK((idfzt(f).s - R * f.vec()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("idfzt is an isometry") {
  GridParams g(3, 5, 1000.0);
  RngStream rng(5);
  const DDFrame f = random_frame(g, rng);
  CHECK_THAT(idfzt(f).s.norm(), WithinAbs(f.X.norm(), 1e-12));
}

TEST_CASE("dfzt: round trip, zeros, adjoint relation") {
  GridParams g(3, 5, 1000.0);
  RngStream rng(7);
  const DDFrame f = random_frame(g, rng);
  const DDFrame back = dfzt(idfzt(f));
  CHECK((back.X - f.X).cwiseAbs().maxCoeff() < 1e-12);

  FDVector zero(g);
  CHECK(dfzt(zero).X.cwiseAbs().maxCoeff() == 0.0);

  // <idfzt(X), s> == <vec(X), vec(dfzt(s))>
  FDVector s(g);
  for (int i = 0; i < g.frame_size(); ++i) s.s[i] = rng.cnormal(1.0);
  const cxd lhs = idfzt(f).s.dot(s.s);
  const cxd rhs = f.vec().dot(dfzt(s).vec());
  CHECK_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-12));
}

TEST_CASE("build_R: trivial grid, unitarity, column agreement with idfzt") {
  GridParams g1(1, 1, 1.0);
  const Mat R1 = build_R(g1);
  REQUIRE(R1.rows() == 1);
  CHECK_THAT(std::abs(R1(0, 0) - cxd(1, 0)), WithinAbs(0.0, 1e-15));

  GridParams g(3, 5, 1000.0);
  const int mn = g.frame_size();
  const Mat R = build_R(g);
  CHECK((R.adjoint() * R - Mat::Identity(mn, mn)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((R * R.adjoint() - Mat::Identity(mn, mn)).cwiseAbs().maxCoeff() < 1e-12);

  // Column-by-column equality with the operational transform.
  for (int i = 0; i < mn; ++i) {
    DDFrame e(g);
    e.X(i % g.M, i / g.M) = 1.0;
    CHECK((idfzt(e).s - R.col(i)).cwiseAbs().maxCoeff() < 1e-13);
  }

  CHECK_THROWS_AS(build_R(GridParams(100, 100, 1.0)), std::invalid_argument);
}

TEST_CASE("td_from_fd: delta carrier, Parseval, consistency with dd_to_td") {
  GridParams g(3, 5, 1000.0);
  FDVector s(g);
  s.s[0] = 1.0;
  const Vec x = td_from_fd(s).x;
  const double c = 1.0 / std::sqrt(static_cast<double>(g.frame_size()));
  for (int n = 0; n < g.frame_size(); ++n) CHECK_THAT(std::abs(x[n] - cxd(c, 0)), WithinAbs(0.0, 1e-14));

  RngStream rng(13);
  const DDFrame f = random_frame(g, rng);
  const Vec via_fd = td_from_fd(idfzt(f)).x;
  const Vec direct = dd_to_td(f).x;
  CHECK((via_fd - direct).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THAT(via_fd.norm(), WithinAbs(idfzt(f).s.norm(), 1e-12));

  // fd_from_td inverts td_from_fd.
  FDVector rs(g);
  for (int i = 0; i < g.frame_size(); ++i) rs.s[i] = rng.cnormal(1.0);
  CHECK((fd_from_td(td_from_fd(rs)).s - rs.s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("4-QAM Gray mapping") {
  const Constellation qam = Constellation::qam4();
  const double a = 1.0 / std::sqrt(2.0);

  const Vec s = qam_map({0, 0}, qam);
  REQUIRE(s.size() == 1);
  CHECK_THAT(std::abs(s[0] - cxd(a, a)), WithinAbs(0.0, 1e-15));

  // Exhaustive round trip over all 2-bit patterns.
  for (int b0 = 0; b0 <= 1; ++b0) {
    for (int b1 = 0; b1 <= 1; ++b1) {
      const std::vector<uint8_t> bits{static_cast<uint8_t>(b0), static_cast<uint8_t>(b1)};
      CHECK(qam_demap(qam_map(bits, qam), qam) == bits);
    }
  }

  double energy = 0;
  for (const auto& p : qam.points) energy += std::norm(p);
  CHECK_THAT(energy / qam.points.size(), WithinAbs(1.0, 1e-15));

  CHECK_THROWS_AS(qam_map({0, 1, 0}, qam), std::invalid_argument);
}
