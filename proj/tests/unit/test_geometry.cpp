#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "uwbfp/error.hpp"
#include "uwbfp/geometry.hpp"

using namespace uwbfp;

TEST_CASE("distance examples") {
  CHECK(distance({0, 0}, {0, 0}) == 0.0);
  CHECK(distance({0, 0}, {3, 4}) == 5.0);
  const double expected = oracle::dist2d(100, 100, 900, 1900);
  CHECK(distance({100, 100}, {900, 1900}) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected == doctest::Approx(1969.7715).epsilon(1e-7));
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  for (int i = 0; i < 1000; ++i) {
    const PointMM p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
    CHECK(distance(p, q) == distance(q, p));
    CHECK(distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9);
  }
}

TEST_CASE("trilaterate symmetric exact case") {
  const AnchorLayout anchors;
  const double r = std::sqrt(1250000.0);
  const PointMM p = trilaterate(anchors, {r, r, r});
  CHECK(p.x == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("trilaterate inverts oracle distances") {
  const AnchorLayout anchors({0, 0}, {0, 2000}, {1000, 0});
  const RangeTriple ranges{oracle::dist2d(250, 500, 0, 0), oracle::dist2d(250, 500, 0, 2000),
                           oracle::dist2d(250, 500, 1000, 0)};
  CHECK(ranges.d_a == doctest::Approx(559.0170).epsilon(1e-7));
  CHECK(ranges.d_b == doctest::Approx(1520.6907).epsilon(1e-7));
  CHECK(ranges.d_c == doctest::Approx(901.3878).epsilon(1e-7));
  const PointMM p = trilaterate(anchors, ranges);
  CHECK(std::abs(p.x - 250.0) < 1e-9);
  CHECK(std::abs(p.y - 500.0) < 1e-9);
}

TEST_CASE("collinear anchors are rejected") {
  try {
    const AnchorLayout bad({0, 0}, {1, 0}, {2, 0});
    trilaterate(bad, {1, 1, 1});
    FAIL("expected CollinearAnchors");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CollinearAnchors);
  }
  CHECK_THROWS_AS(AnchorLayout({0, 0}, {0, 0}, {1, 1}), Error);
}

TEST_CASE("trilaterate rejects invalid ranges") {
  const AnchorLayout anchors;
  for (double bad : {0.0, -3.0, std::nan(""), std::numeric_limits<double>::infinity()}) {
    try {
      trilaterate(anchors, {100, bad, 100});
      FAIL("expected NonFiniteRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonFiniteRange);
    }
  }
}

TEST_CASE("trilaterate recovers random in-area points") {
  const AnchorLayout anchors;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 1000.0), uy(0.0, 2000.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = ux(rng), y = uy(rng);
    const RangeTriple r{oracle::dist2d(x, y, 0, 0), oracle::dist2d(x, y, 0, 2000),
                        oracle::dist2d(x, y, 1000, 0)};
    if (r.d_a <= 0.0) continue;
    const PointMM p = trilaterate(anchors, r);
    CHECK(oracle::dist2d(p.x, p.y, x, y) < 1e-6);
  }
}

TEST_CASE("trilaterate is translation-equivariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e5, 1e5), ux(0.0, 1000.0), uy(0.0, 2000.0);
  const AnchorLayout base;
  for (int i = 0; i < 200; ++i) {
    const PointMM shift{u(rng), u(rng)};
    const AnchorLayout moved({shift.x, shift.y}, {shift.x, shift.y + 2000}, {shift.x + 1000, shift.y});
    const double x = ux(rng), y = uy(rng);
    const RangeTriple r = base.ranges_from({x, y});
    if (r.d_a <= 0.0) continue;
    const PointMM p0 = trilaterate(base, r);
    const PointMM p1 = trilaterate(moved, r);
    CHECK(std::abs((p1.x - shift.x) - p0.x) < 1e-6);
    CHECK(std::abs((p1.y - shift.y) - p0.y) < 1e-6);
  }
}

TEST_CASE("noisy ranges resolve to the radical-line intersection") {
  const AnchorLayout anchors;
  // Inflating every range still yields a finite, deterministic estimate.
  const RangeTriple r = anchors.ranges_from({400, 700});
  const RangeTriple noisy{r.d_a + 30, r.d_b - 10, r.d_c + 5};
  const PointMM p1 = trilaterate(anchors, noisy);
  const PointMM p2 = trilaterate(anchors, noisy);
  CHECK(p1 == p2);
  CHECK(is_finite(p1));
}
