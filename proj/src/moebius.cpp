#include "wplab/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace wplab {

Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WPLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(std::min(hw, 8u));
}

void MoebiusMap::canonicalize_sign() {
  double mx = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  double cut = 1e-13 * mx;
  for (double e : {a, b, c, d}) {
    if (std::abs(e) > cut) {
      if (e < 0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
      }
      break;
    }
  }
}

void MoebiusMap::normalize() {
  double dt = det();
  if (!(dt > 0) || !std::isfinite(dt)) {
    throw std::domain_error("MoebiusMap: determinant must be positive and finite, got " +
                            std::to_string(dt));
  }
  if (std::abs(dt - 1.0) > 0) {
    double s = 1.0 / std::sqrt(dt);
    a *= s;
    b *= s;
    c *= s;
    d *= s;
  }
  canonicalize_sign();
}

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
  MoebiusMap r;
  r.a = m.a * n.a + m.b * n.c;
  r.b = m.a * n.b + m.b * n.d;
  r.c = m.c * n.a + m.d * n.c;
  r.d = m.c * n.b + m.d * n.d;
  r.canonicalize_sign();
  return r;
}

double psl_distance(const MoebiusMap& m, const MoebiusMap& n) {
  double plus = std::max({std::abs(m.a - n.a), std::abs(m.b - n.b),
                          std::abs(m.c - n.c), std::abs(m.d - n.d)});
  double minus = std::max({std::abs(m.a + n.a), std::abs(m.b + n.b),
                           std::abs(m.c + n.c), std::abs(m.d + n.d)});
  return std::min(plus, minus);
}

bool psl_equal(const MoebiusMap& m, const MoebiusMap& n, double tol) {
  return psl_distance(m, n) <= tol;
}

std::ostream& operator<<(std::ostream& os, const MoebiusMap& m) {
  return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

bool same_point(const BoundaryPoint& p, const BoundaryPoint& q, double tol) {
  if (p.at_infinity || q.at_infinity) return p.at_infinity && q.at_infinity;
  double scale = std::max({1.0, std::abs(p.x), std::abs(q.x)});
  return std::abs(p.x - q.x) <= tol * scale;
}

const char* to_string(MapClass k) {
  switch (k) {
    case MapClass::Elliptic: return "elliptic";
    case MapClass::Parabolic: return "parabolic";
    case MapClass::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

const char* to_string(LineKind k) {
  switch (k) {
    case LineKind::Crossing: return "crossing";
    case LineKind::Disjoint: return "disjoint";
    case LineKind::Asymptotic: return "asymptotic";
  }
  return "?";
}

MapClass classify(const MoebiusMap& m) {
  double t = std::abs(m.trace());
  double tol = tolerances().degeneracy;
  if (t > 2.0 + tol) return MapClass::Hyperbolic;
  if (t < 2.0 - tol) return MapClass::Elliptic;
  return MapClass::Parabolic;
}

double translation_length(const MoebiusMap& m) {
  MapClass k = classify(m);
  if (k != MapClass::Hyperbolic) {
    throw std::domain_error(std::string("translation_length: map is ") + to_string(k) +
                            ", not hyperbolic");
  }
  return 2.0 * std::acosh(std::abs(m.trace()) / 2.0);
}

GeodesicLine axis(const MoebiusMap& m) {
  MapClass k = classify(m);
  if (k != MapClass::Hyperbolic) {
    throw std::domain_error(std::string("axis: map is ") + to_string(k) + ", not hyperbolic");
  }
  double tr = m.trace();
  double disc = tr * tr - 4.0;  // equals (a-d)^2 + 4bc, but cancellation-free
  double sq = std::sqrt(disc);
  if (m.c == 0.0) {
    // Fixed points oo and b/(d-a); oo attracts iff |a| > |d|.
    BoundaryPoint fin = BoundaryPoint::finite(m.b / (m.d - m.a));
    if (std::abs(m.a) > std::abs(m.d)) return {fin, BoundaryPoint::infinity()};
    return {BoundaryPoint::infinity(), fin};
  }
  // Roots of c z^2 + (d-a) z - b = 0, written to avoid cancellation.
  double B = m.d - m.a;
  double q = -0.5 * (B + std::copysign(sq, B));
  double z1, z2;
  if (q != 0.0) {
    z1 = q / m.c;
    z2 = -m.b / q;
  } else {  // B == 0
    z1 = sq / (2.0 * m.c);
    z2 = -z1;
  }
  // Attracting fixed point has |c z + d| > 1 (derivative 1/(cz+d)^2 < 1).
  double s1 = std::abs(m.c * z1 + m.d);
  double s2 = std::abs(m.c * z2 + m.d);
  BoundaryPoint p1 = BoundaryPoint::finite(z1), p2 = BoundaryPoint::finite(z2);
  if (s1 > s2) return {p2, p1};
  return {p1, p2};
}

BoundaryPoint apply(const MoebiusMap& m, const BoundaryPoint& x) {
  if (x.at_infinity) {
    if (m.c == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::finite(m.a / m.c);
  }
  double denom = m.c * x.x + m.d;
  if (denom == 0.0) return BoundaryPoint::infinity();
  double num = m.a * x.x + m.b;
  double v = num / denom;
  if (!std::isfinite(v)) return BoundaryPoint::infinity();
  return BoundaryPoint::finite(v);
}

GeodesicLine apply(const MoebiusMap& m, const GeodesicLine& g) {
  return {apply(m, g.p), apply(m, g.q)};
}

MoebiusMap map_to_standard(const GeodesicLine& g) {
  if (g.p.at_infinity && g.q.at_infinity) {
    throw std::invalid_argument("map_to_standard: degenerate line (oo, oo)");
  }
  if (g.p.at_infinity) {
    // oo -> 0, q -> oo
    return MoebiusMap(0, 1, -1, g.q.x);
  }
  if (g.q.at_infinity) {
    // p -> 0, oo -> oo
    return MoebiusMap(1, -g.p.x, 0, 1);
  }
  double p = g.p.x, q = g.q.x;
  if (p == q) throw std::invalid_argument("map_to_standard: endpoints coincide");
  if (p > q) return MoebiusMap(1, -p, 1, -q);
  return MoebiusMap(-1, p, 1, -q);
}

namespace {

// Endpoint images of g2 in the frame where g1 is (0, oo). Infinities are
// mapped to +-HUGE so that the u formula degenerates to 1 gracefully.
struct Frame {
  double r, s;
  bool r_inf, s_inf;
};

Frame standard_frame(const GeodesicLine& g1, const GeodesicLine& g2) {
  MoebiusMap n = map_to_standard(g1);
  BoundaryPoint rp = apply(n, g2.p);
  BoundaryPoint sp = apply(n, g2.q);
  return {rp.at_infinity ? 0 : rp.x, sp.at_infinity ? 0 : sp.x, rp.at_infinity, sp.at_infinity};
}

}  // namespace

LineConfiguration line_configuration(const GeodesicLine& g1, const GeodesicLine& g2) {
  double tol = tolerances().degeneracy;
  bool same_fwd = same_point(g1.p, g2.p, tol) && same_point(g1.q, g2.q, tol);
  bool same_rev = same_point(g1.p, g2.q, tol) && same_point(g1.q, g2.p, tol);
  if (same_fwd || same_rev) {
    throw std::invalid_argument("line_configuration: identical lines");
  }
  Frame f = standard_frame(g1, g2);
  if (f.r_inf || f.s_inf) return {1.0, LineKind::Asymptotic};
  if (f.r == 0.0 || f.s == 0.0) return {1.0, LineKind::Asymptotic};
  double u = std::abs(f.r + f.s) / std::abs(f.r - f.s);
  if (std::abs(u - 1.0) <= tol) return {1.0, LineKind::Asymptotic};
  if (u < 1.0) return {u, LineKind::Crossing};
  return {u, LineKind::Disjoint};
}

double signed_crossing_cosine(const GeodesicLine& g1, const GeodesicLine& g2) {
  Frame f = standard_frame(g1, g2);
  if (f.r_inf || f.s_inf || f.r * f.s >= 0) {
    throw std::domain_error("signed_crossing_cosine: lines do not cross");
  }
  return (f.r + f.s) / (f.s - f.r);
}

MoebiusMap conjugating_map(const MoebiusMap& u, const MoebiusMap& v) {
  MoebiusMap nu = map_to_standard(axis(u));
  MoebiusMap nv = map_to_standard(axis(v));
  return nv.inverse() * nu;
}

}  // namespace wplab
