#include <doctest.h>

#include <cmath>
#include <random>

#include "wplab/moebius.hpp"

using namespace wplab;

namespace {

std::mt19937_64 rng(20240811u);

MoebiusMap random_sl2() {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  double a = 0, b = 0, c = 0;
  do {
    a = coef(rng);
  } while (std::abs(a) < 0.2);
  b = coef(rng);
  c = coef(rng);
  double d = (1.0 + b * c) / a;
  return MoebiusMap(a, b, c, d);
}

MoebiusMap random_hyperbolic() {
  std::uniform_real_distribution<double> len(0.3, 3.0);
  double t = len(rng);
  MoebiusMap diag(std::exp(t / 2), 0, 0, std::exp(-t / 2));
  MoebiusMap k = random_sl2();
  return k * diag * k.inverse();
}

// Euclidean tangent data of the geodesic (p,q) at a point z0 on it, oriented
// from p to q. Vertical lines get direction (0, +-1).
struct Tangent {
  double dx, dy;
};

Tangent tangent_at(const GeodesicLine& g, double x0, double y0) {
  if (g.p.at_infinity) return {0, -1};
  if (g.q.at_infinity) return {0, 1};
  double p = g.p.x, q = g.q.x;
  // Semicircle (x-c)^2 + y^2 = rho^2 traversed from p to q.
  double c = (p + q) / 2;
  (void)c;
  double dx = y0, dy = -(x0 - (p + q) / 2) * 0 + 0;
  // Tangent of circle at (x0, y0): perpendicular to radius (x0-c, y0).
  double cx = (p + q) / 2;
  dx = y0;
  dy = -(x0 - cx);
  // Orient toward q: the motion along the circle from p to q has x increasing
  // iff q > p near the top; flip so the tangent points q-ward.
  if ((q > p && dx < 0) || (q < p && dx > 0)) {
    dx = -dx;
    dy = -dy;
  }
  return {dx, dy};
}

// Brute-force geometric oracle for crossing lines: intersection point in the
// upper half-plane and the Euclidean angle between oriented tangents.
double oracle_crossing_cos(const GeodesicLine& g1, const GeodesicLine& g2) {
  auto circle = [](const GeodesicLine& g) {
    REQUIRE(!g.p.at_infinity);
    REQUIRE(!g.q.at_infinity);
    double c = (g.p.x + g.q.x) / 2;
    double r = std::abs(g.q.x - g.p.x) / 2;
    return std::pair{c, r};
  };
  double x0 = 0, y0 = 0;
  if (g1.p.at_infinity || g1.q.at_infinity) {
    double xline = g1.p.at_infinity ? g1.q.x : g1.p.x;
    auto [c2, r2] = circle(g2);
    x0 = xline;
    y0 = std::sqrt(r2 * r2 - (xline - c2) * (xline - c2));
  } else if (g2.p.at_infinity || g2.q.at_infinity) {
    return oracle_crossing_cos(g2, g1);
  } else {
    auto [c1, r1] = circle(g1);
    auto [c2, r2] = circle(g2);
    x0 = (r1 * r1 - r2 * r2 - c1 * c1 + c2 * c2) / (2 * (c2 - c1));
    y0 = std::sqrt(r1 * r1 - (x0 - c1) * (x0 - c1));
  }
  Tangent t1 = tangent_at(g1, x0, y0);
  Tangent t2 = tangent_at(g2, x0, y0);
  double dot = t1.dx * t2.dx + t1.dy * t2.dy;
  double n1 = std::hypot(t1.dx, t1.dy), n2 = std::hypot(t2.dx, t2.dy);
  return dot / (n1 * n2);
}

GeodesicLine line(double p, double q) {
  return {BoundaryPoint::finite(p), BoundaryPoint::finite(q)};
}

}  // namespace

TEST_SUITE_BEGIN("moebius");

TEST_CASE("classification follows the trace trichotomy") {
  CHECK(classify(MoebiusMap(1, 1, 0, 1)) == MapClass::Parabolic);
  CHECK(classify(MoebiusMap(2, 0, 0, 0.5)) == MapClass::Hyperbolic);
  CHECK(classify(MoebiusMap(0, -1, 1, 0)) == MapClass::Elliptic);
}

TEST_CASE("normalization enforces det 1 and PSL sign") {
  MoebiusMap m(-3, 0, 1, -1);  // det = 3
  CHECK(m.det() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.a > 0);  // canonical sign
  CHECK_THROWS_AS(MoebiusMap(1, 0, 0, -1), std::domain_error);
}

TEST_CASE("translation length matches 2 arccosh(|tr|/2)") {
  MoebiusMap tr3(2, 1, 1, 1);
  CHECK(tr3.trace() == doctest::Approx(3.0));
  CHECK(translation_length(tr3) == doctest::Approx(2.0 * std::acosh(1.5)).epsilon(1e-12));
  CHECK(translation_length(tr3) == doctest::Approx(1.9248473002).epsilon(1e-9));

  double e = std::exp(0.25);
  MoebiusMap unit_len(e, 0, 0, 1 / e);  // tr = 2cosh(1/4), length 1/2... scale:
  CHECK(translation_length(unit_len) == doctest::Approx(0.5).epsilon(1e-12));
  MoebiusMap half(std::exp(0.5), 0, 0, std::exp(-0.5));
  CHECK(half.trace() == doctest::Approx(2 * std::cosh(0.5)).epsilon(1e-12));
  CHECK(translation_length(half) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(translation_length(MoebiusMap(1, 1, 0, 1)),
                       doctest::Contains("parabolic"), std::domain_error);
}

TEST_CASE("axis returns (repelling, attracting) fixed points") {
  MoebiusMap m(1, 1, 1, 2);
  GeodesicLine ax = axis(m);
  // Quadratic-formula oracle: c z^2 + (d-a) z - b = 0.
  double z_plus = (-1 + std::sqrt(5.0)) / 2, z_minus = (-1 - std::sqrt(5.0)) / 2;
  CHECK(ax.p.x == doctest::Approx(z_minus).epsilon(1e-12));
  CHECK(ax.q.x == doctest::Approx(z_plus).epsilon(1e-12));

  MoebiusMap diag(std::exp(0.7), 0, 0, std::exp(-0.7));
  GeodesicLine dax = axis(diag);
  CHECK(!dax.p.at_infinity);
  CHECK(dax.p.x == doctest::Approx(0.0));
  CHECK(dax.q.at_infinity);

  CHECK_THROWS_AS(axis(MoebiusMap(1, 1, 0, 1)), std::domain_error);
}

TEST_CASE("axis orientation: the map translates toward q") {
  for (int i = 0; i < 50; ++i) {
    MoebiusMap m = random_hyperbolic();
    GeodesicLine ax = axis(m);
    // A point slightly inside the axis moves toward the attracting endpoint:
    // apply m to the repelling endpoint nudged; distance to q must shrink.
    BoundaryPoint mid = ax.p;  // repelling endpoint is fixed; use derivative test
    MoebiusMap mm = m;
    (void)mid;
    // |c q + d| > 1 at the attracting endpoint
    double cq = ax.q.at_infinity ? std::abs(mm.a) : std::abs(mm.c * ax.q.x + mm.d);
    double cp = ax.p.at_infinity ? std::abs(mm.a) : std::abs(mm.c * ax.p.x + mm.d);
    CHECK(cq > cp);
  }
}

TEST_CASE("line configuration: crossing, disjoint, asymptotic") {
  GeodesicLine vert{BoundaryPoint::finite(0), BoundaryPoint::infinity()};

  LineConfiguration c1 = line_configuration(vert, line(-1, 1));
  CHECK(c1.kind == LineKind::Crossing);
  CHECK(c1.u == doctest::Approx(0.0));

  LineConfiguration c2 = line_configuration(vert, line(1, 2));
  CHECK(c2.kind == LineKind::Disjoint);
  CHECK(c2.u == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::acosh(c2.u) == doctest::Approx(1.76275).epsilon(1e-4));

  LineConfiguration c3 = line_configuration(vert, line(-1, 3));
  CHECK(c3.kind == LineKind::Crossing);
  CHECK(c3.u == doctest::Approx(0.5).epsilon(1e-12));
  // center/radius oracle: cos(theta) = |c|/rho
  CHECK(c3.u == doctest::Approx(1.0 / 2.0));

  LineConfiguration c4 = line_configuration(vert, line(0, 5));
  CHECK(c4.kind == LineKind::Asymptotic);
  CHECK(c4.u == doctest::Approx(1.0));

  CHECK_THROWS_WITH_AS(line_configuration(vert, vert.reversed()),
                       doctest::Contains("identical"), std::invalid_argument);
}

TEST_CASE("apply handles infinity by the limit rules") {
  CHECK(apply(MoebiusMap::identity(), BoundaryPoint::finite(0.3)).x == doctest::Approx(0.3));
  BoundaryPoint img = apply(MoebiusMap(0, -1, 1, 0), BoundaryPoint::infinity());
  CHECK(!img.at_infinity);
  CHECK(img.x == doctest::Approx(0.0));

  GeodesicLine vert{BoundaryPoint::finite(0), BoundaryPoint::infinity()};
  GeodesicLine shifted = apply(MoebiusMap(1, 1, 0, 1), vert);
  CHECK(shifted.p.x == doctest::Approx(1.0));
  CHECK(shifted.q.at_infinity);
}

TEST_CASE("translation length is a conjugation invariant") {
  for (int i = 0; i < 40; ++i) {
    MoebiusMap m = random_hyperbolic();
    MoebiusMap k = random_sl2();
    double l1 = translation_length(m);
    double l2 = translation_length(k * m * k.inverse());
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-10));
  }
}

TEST_CASE("configuration is symmetric and Moebius invariant") {
  std::uniform_real_distribution<double> pt(-4.0, 4.0);
  for (int i = 0; i < 60; ++i) {
    double p1 = pt(rng), q1 = pt(rng), p2 = pt(rng), q2 = pt(rng);
    if (std::abs(p1 - q1) < 0.1 || std::abs(p2 - q2) < 0.1) continue;
    GeodesicLine g1 = line(p1, q1), g2 = line(p2, q2);
    LineConfiguration a, b;
    try {
      a = line_configuration(g1, g2);
      b = line_configuration(g2, g1);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (a.kind == LineKind::Asymptotic) continue;
    CHECK(a.kind == b.kind);
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-10));

    MoebiusMap k = random_sl2();
    LineConfiguration c = line_configuration(apply(k, g1), apply(k, g2));
    CHECK(c.kind == a.kind);
    CHECK(a.u == doctest::Approx(c.u).epsilon(1e-9));
  }
}

TEST_CASE("crossing u agrees with the geometric intersection-angle oracle") {
  std::uniform_real_distribution<double> pt(-4.0, 4.0);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 40; ++i) {
    double p1 = pt(rng), q1 = pt(rng), p2 = pt(rng), q2 = pt(rng);
    if (std::abs(p1 - q1) < 0.2 || std::abs(p2 - q2) < 0.2) continue;
    GeodesicLine g1 = line(p1, q1), g2 = line(p2, q2);
    LineConfiguration cfg;
    try {
      cfg = line_configuration(g1, g2);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (cfg.kind != LineKind::Crossing) continue;
    ++tested;
    double oracle = oracle_crossing_cos(g1, g2);
    CHECK(cfg.u == doctest::Approx(std::abs(oracle)).epsilon(1e-9));
    // And the signed version matches the oracle including orientation.
    CHECK(signed_crossing_cosine(g1, g2) == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(tested >= 30);
}

TEST_CASE("disjoint u agrees with a brute-force distance minimization") {
  GeodesicLine vert{BoundaryPoint::finite(0), BoundaryPoint::infinity()};
  GeodesicLine g2 = line(1, 2);
  // minimize cosh d(it, z(phi)) over the two curves
  double best = 1e300;
  for (int i = 1; i < 2000; ++i) {
    double t = 0.01 * i;
    for (int j = 1; j < 2000; ++j) {
      double phi = 3.14159265358979 * j / 2000.0;
      double x = 1.5 + 0.5 * std::cos(phi), y = 0.5 * std::sin(phi);
      double coshd = 1 + (x * x + (t - y) * (t - y)) / (2 * t * y);
      best = std::min(best, coshd);
    }
  }
  LineConfiguration cfg = line_configuration(vert, g2);
  CHECK(cfg.u == doctest::Approx(best).epsilon(1e-4));
}

TEST_SUITE_END();
