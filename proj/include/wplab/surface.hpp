#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wplab/moebius.hpp"

namespace wplab {

enum class Topology { PuncturedTorus, Genus2 };

const char* to_string(Topology t);

// Pants decomposition skeleton: nodes are pants, each with three boundary
// slots; an edge pairs two slots (possibly on the same node), unpaired slots
// are cusps.
struct PantsDecomposition {
  struct Slot {
    int pants = 0;
    int slot = 0;
  };
  struct Gluing {
    Slot first, second;
  };
  int num_pants = 0;
  std::vector<Gluing> gluings;
  std::vector<Slot> cusps;

  static PantsDecomposition for_topology(Topology t);
  // Every slot glued once or cusped, and curve count matches 3g-3+n.
  bool consistent() const;
  int num_curves() const { return static_cast<int>(gluings.size()); }
};

// Fenchel-Nielsen coordinates: per pants curve a length > 0 and a twist.
struct FNPoint {
  Topology topology = Topology::PuncturedTorus;
  std::vector<double> lengths;
  std::vector<double> twists;

  std::size_t num_curves() const { return lengths.size(); }
  void validate() const;  // throws std::domain_error on bad data
};

struct BallCache;  // defined in enumeration.hpp

// Marked hyperbolic surface as a discrete group of Moebius maps plus a
// dictionary of named curves (words over the generator letters).
struct SurfaceGroup {
  Topology topology = Topology::PuncturedTorus;
  std::vector<MoebiusMap> generators;           // letter i+1 <-> generators[i]
  std::string generator_letters;                // e.g. "ab" or "abcd"
  std::map<std::string, std::string> curves;    // label -> word
  std::vector<std::string> pants_curves;        // labels of the FN curves, in order
  std::vector<std::string> relators;            // words evaluating to +-identity
  FNPoint origin;

  mutable std::shared_ptr<BallCache> ball_cache;  // enumeration memo, lazily built

  int rank() const { return static_cast<int>(generators.size()); }
};

// Letters of a word: +k is generator k (1-based), -k its inverse.
using Letters = std::vector<std::int8_t>;

Letters parse_letters(const SurfaceGroup& g, const std::string& word);
std::string letters_to_string(const SurfaceGroup& g, const Letters& w);
Letters free_reduce(Letters w);
Letters invert_letters(const Letters& w);

// Word lookup: curve label first, else literal letter string.
std::string resolve_word(const SurfaceGroup& g, const std::string& word_or_label);
MoebiusMap word_matrix(const SurfaceGroup& g, const std::string& word_or_label);
MoebiusMap letters_matrix(const SurfaceGroup& g, const Letters& w);

// Right-angled hexagon: alternating sides a1,s3,a2,s1,a3,s2 with
// cosh s_k = (cosh a_i cosh a_j + cosh a_k)/(sinh a_i sinh a_j).
std::array<double, 3> hexagon_sides(double a1, double a2, double a3);

// Hyperbolic translation of signed length t along the oriented line.
MoebiusMap twist_map(const GeodesicLine& axis_line, double t);

// Pair of pants with boundary lengths l1,l2,l3: generators X1,X2,X3 with
// X3 X2 X1 = +-identity and |tr X_i| = 2 cosh(l_i/2).
std::array<MoebiusMap, 3> pants_generators(double l1, double l2, double l3);
SurfaceGroup pants_group(double l1, double l2, double l3);

SurfaceGroup punctured_torus_group(double length, double twist);
SurfaceGroup build_surface(const FNPoint& fn);

// Length of the closed geodesic in the class of the word; throws a
// classified error for parabolic or elliptic words.
double curve_length(const SurfaceGroup& g, const std::string& word_or_label);

// Rebuild with FN coordinate `index` offset by `step`. Indices enumerate
// lengths first then twists (0..2N-1).
SurfaceGroup perturbed_group(const FNPoint& fn, std::size_t index, double step);

// Earthquake along a named simple curve of the punctured torus ("a" or "b").
SurfaceGroup twist_deformed(const SurfaceGroup& g, const std::string& curve, double t);

// Surface specification JSON:
// {"topology": "punctured_torus"|"genus2", "lengths": [...], "twists": [...],
//  "probes": ["word", ...]}. Unknown keys are rejected.
SurfaceGroup surface_from_json(const std::string& json_text);
FNPoint fn_point_from_json(const std::string& json_text,
                           std::vector<std::string>* probes = nullptr);

// Chart inversion for the punctured torus: FN coordinates of the marked
// group (A = matrix of "a", B = matrix of "b") in the standard chart.
std::pair<double, double> torus_fn_coordinates(const MoebiusMap& A, const MoebiusMap& B);

}  // namespace wplab
