#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "wplab/config.hpp"

namespace wplab {

// Real Moebius map z -> (az+b)/(cz+d), kept at det = 1 and identified with
// its negative (PSL(2,R)). Construction and multiplication renormalize, so
// long words do not drift away from the group.
struct MoebiusMap {
  double a = 1, b = 0, c = 0, d = 1;

  MoebiusMap() = default;
  MoebiusMap(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
    normalize();
  }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  static MoebiusMap identity() { return {}; }
  MoebiusMap inverse() const {
    MoebiusMap r;
    r.a = d;
    r.b = -b;
    r.c = -c;
    r.d = a;
    r.canonicalize_sign();
    return r;
  }

  // Rescale to det = 1 (requires det > 0) and flip the global sign so the
  // first entry of (a,b,c,d) with non-negligible magnitude is positive.
  void normalize();

  // Sign canonicalization alone. Products of unit-determinant maps keep
  // det = 1 to machine precision, and recomputing ad - bc on large entries
  // cancels catastrophically, so multiplication never rescales.
  void canonicalize_sign();
};

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n);

// Entrywise max distance minimized over the global sign.
double psl_distance(const MoebiusMap& m, const MoebiusMap& n);
bool psl_equal(const MoebiusMap& m, const MoebiusMap& n, double tol);

std::ostream& operator<<(std::ostream& os, const MoebiusMap& m);

// Point of the boundary circle R u {oo} of the upper half-plane.
struct BoundaryPoint {
  double x = 0;
  bool at_infinity = false;

  static BoundaryPoint infinity() { return {0, true}; }
  static BoundaryPoint finite(double v) { return {v, false}; }
};

bool same_point(const BoundaryPoint& p, const BoundaryPoint& q, double tol);

// Oriented geodesic of the upper half-plane, stored by ordered endpoints.
struct GeodesicLine {
  BoundaryPoint p, q;  // from p toward q

  GeodesicLine reversed() const { return {q, p}; }
};

enum class MapClass { Elliptic, Parabolic, Hyperbolic };

const char* to_string(MapClass k);

// |trace| trichotomy with the global degeneracy tolerance.
MapClass classify(const MoebiusMap& m);

// 2*arccosh(|tr|/2); throws std::domain_error naming the class otherwise.
double translation_length(const MoebiusMap& m);

// Ordered (repelling, attracting) fixed points of a hyperbolic map, so the
// map translates toward q along its axis.
GeodesicLine axis(const MoebiusMap& m);

BoundaryPoint apply(const MoebiusMap& m, const BoundaryPoint& x);
GeodesicLine apply(const MoebiusMap& m, const GeodesicLine& g);

enum class LineKind { Crossing, Disjoint, Asymptotic };

const char* to_string(LineKind k);

// u < 1: u = cos of the crossing angle; u > 1: u = cosh of the distance;
// u = 1: the lines share an endpoint.
struct LineConfiguration {
  double u = 0;
  LineKind kind = LineKind::Crossing;
};

LineConfiguration line_configuration(const GeodesicLine& g1, const GeodesicLine& g2);

// Signed cosine at the crossing of two oriented lines, measured against g1.
// Requires a crossing configuration; |result| equals configuration u.
double signed_crossing_cosine(const GeodesicLine& g1, const GeodesicLine& g2);

// det-1 map sending the oriented line to (0, oo).
MoebiusMap map_to_standard(const GeodesicLine& g);

// W with W U W^{-1} = +-V for hyperbolic U, V of equal translation length.
MoebiusMap conjugating_map(const MoebiusMap& u, const MoebiusMap& v);

}  // namespace wplab
