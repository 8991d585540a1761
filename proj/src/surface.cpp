#include "wplab/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wplab {

const char* to_string(Topology t) {
  switch (t) {
    case Topology::PuncturedTorus: return "punctured_torus";
    case Topology::Genus2: return "genus2";
  }
  return "?";
}

PantsDecomposition PantsDecomposition::for_topology(Topology t) {
  PantsDecomposition d;
  if (t == Topology::PuncturedTorus) {
    // One pants, two slots self-glued, one cusp.
    d.num_pants = 1;
    d.gluings.push_back({{0, 0}, {0, 1}});
    d.cusps.push_back({0, 2});
  } else {
    // Two pants glued slot-to-slot along all three curves.
    d.num_pants = 2;
    for (int s = 0; s < 3; ++s) d.gluings.push_back({{0, s}, {1, s}});
  }
  return d;
}

bool PantsDecomposition::consistent() const {
  std::vector<int> used(static_cast<std::size_t>(num_pants) * 3, 0);
  auto touch = [&](const Slot& s) {
    if (s.pants < 0 || s.pants >= num_pants || s.slot < 0 || s.slot >= 3) return false;
    return ++used[static_cast<std::size_t>(s.pants) * 3 + s.slot] == 1;
  };
  for (const auto& g : gluings) {
    if (!touch(g.first) || !touch(g.second)) return false;
  }
  for (const auto& c : cusps) {
    if (!touch(c)) return false;
  }
  for (int u : used) {
    if (u != 1) return false;
  }
  // 3g-3+n curve count: with P pants and n cusps, curves = (3P - n)/2 and the
  // dimension identity follows from chi = -P.
  int n = static_cast<int>(cusps.size());
  return static_cast<int>(gluings.size()) * 2 + n == 3 * num_pants;
}

void FNPoint::validate() const {
  std::size_t expected = topology == Topology::PuncturedTorus ? 1 : 3;
  if (lengths.size() != expected || twists.size() != expected) {
    throw std::domain_error("FNPoint: expected " + std::to_string(expected) +
                            " length/twist pairs for " + to_string(topology));
  }
  for (double l : lengths) {
    if (!(l > 0) || !std::isfinite(l)) {
      throw std::domain_error("FNPoint: lengths must be positive, got " + std::to_string(l));
    }
  }
  for (double t : twists) {
    if (!std::isfinite(t)) throw std::domain_error("FNPoint: twists must be finite");
  }
}

Letters parse_letters(const SurfaceGroup& g, const std::string& word) {
  Letters out;
  out.reserve(word.size());
  for (char ch : word) {
    char low = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    auto pos = g.generator_letters.find(low);
    if (pos == std::string::npos) {
      throw std::domain_error(std::string("unknown generator letter '") + ch + "' in word \"" +
                              word + "\" (alphabet: " + g.generator_letters + ")");
    }
    std::int8_t v = static_cast<std::int8_t>(pos + 1);
    out.push_back(std::isupper(static_cast<unsigned char>(ch)) ? static_cast<std::int8_t>(-v)
                                                               : v);
  }
  return out;
}

std::string letters_to_string(const SurfaceGroup& g, const Letters& w) {
  std::string s;
  s.reserve(w.size());
  for (std::int8_t l : w) {
    char ch = g.generator_letters[static_cast<std::size_t>(std::abs(l) - 1)];
    s.push_back(l < 0 ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch);
  }
  return s;
}

Letters free_reduce(Letters w) {
  Letters out;
  out.reserve(w.size());
  for (std::int8_t l : w) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Letters invert_letters(const Letters& w) {
  Letters out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(static_cast<std::int8_t>(-*it));
  return out;
}

std::string resolve_word(const SurfaceGroup& g, const std::string& word_or_label) {
  auto it = g.curves.find(word_or_label);
  if (it != g.curves.end()) return it->second;
  return word_or_label;
}

MoebiusMap letters_matrix(const SurfaceGroup& g, const Letters& w) {
  MoebiusMap m = MoebiusMap::identity();
  for (std::int8_t l : w) {
    const MoebiusMap& gen = g.generators[static_cast<std::size_t>(std::abs(l) - 1)];
    m = m * (l > 0 ? gen : gen.inverse());
  }
  return m;
}

MoebiusMap word_matrix(const SurfaceGroup& g, const std::string& word_or_label) {
  return letters_matrix(g, free_reduce(parse_letters(g, resolve_word(g, word_or_label))));
}

std::array<double, 3> hexagon_sides(double a1, double a2, double a3) {
  for (double a : {a1, a2, a3}) {
    if (!(a > 0) || !std::isfinite(a)) {
      throw std::domain_error("hexagon_sides: sides must be positive, got " + std::to_string(a));
    }
  }
  double c1 = std::cosh(a1), c2 = std::cosh(a2), c3 = std::cosh(a3);
  double s1 = std::sinh(a1), s2 = std::sinh(a2), s3 = std::sinh(a3);
  return {
      std::acosh((c2 * c3 + c1) / (s2 * s3)),
      std::acosh((c3 * c1 + c2) / (s3 * s1)),
      std::acosh((c1 * c2 + c3) / (s1 * s2)),
  };
}

MoebiusMap twist_map(const GeodesicLine& axis_line, double t) {
  if (t == 0.0) return MoebiusMap::identity();
  MoebiusMap n = map_to_standard(axis_line);
  double e = std::exp(t / 2.0);
  MoebiusMap diag(e, 0, 0, 1.0 / e);
  return n.inverse() * diag * n;
}

std::array<MoebiusMap, 3> pants_generators(double l1, double l2, double l3) {
  for (double l : {l1, l2, l3}) {
    if (!(l > 0) || !std::isfinite(l)) {
      throw std::domain_error("pants_group: boundary lengths must be positive, got " +
                              std::to_string(l));
    }
  }
  auto sides = hexagon_sides(l1 / 2, l2 / 2, l3 / 2);
  double q1 = std::exp(l1 / 4), q2 = std::exp(l2 / 4);
  MoebiusMap x1(q1 * q1, 0, 0, 1.0 / (q1 * q1));
  // Conjugate a backwards translation of length l2 by the shift of length
  // s3 along the common perpendicular (-1,1); this pins tr(X2 X1) at
  // -2 cosh(l3/2) by the hexagon relation.
  double ch = std::cosh(sides[2] / 2), sh = std::sinh(sides[2] / 2);
  MoebiusMap shift(ch, sh, sh, ch);
  MoebiusMap x2 = shift * MoebiusMap(1.0 / (q2 * q2), 0, 0, q2 * q2) * shift.inverse();
  MoebiusMap x3 = (x2 * x1).inverse();
  return {x1, x2, x3};
}

SurfaceGroup pants_group(double l1, double l2, double l3) {
  auto xs = pants_generators(l1, l2, l3);
  SurfaceGroup g;
  g.topology = Topology::PuncturedTorus;  // placeholder topology; pants are a building block
  g.generators = {xs[0], xs[1]};
  g.generator_letters = "ab";
  g.curves = {{"1", "a"}, {"2", "b"}, {"3", "AB"}};
  g.pants_curves = {"1", "2", "3"};
  g.relators = {};  // free group
  g.origin.topology = Topology::PuncturedTorus;
  g.origin.lengths = {l1};
  g.origin.twists = {0};
  return g;
}

SurfaceGroup punctured_torus_group(double length, double twist) {
  if (!(length > 0) || !std::isfinite(length)) {
    throw std::domain_error("punctured_torus_group: length must be positive, got " +
                            std::to_string(length));
  }
  double q = std::exp(length / 2);
  double x = q + 1.0 / q;
  double y = x / std::sqrt(x - 2.0);
  MoebiusMap A(q, 0, 0, 1.0 / q);
  // Symmetric base solution: traces (x, y, y) on the Markov variety, with
  // det B0 = 1 in closed form.
  double beta = 2.0 * q / (q * q - 1.0);
  MoebiusMap B0(y / (q + 1.0), beta, beta, y * q / (q + 1.0));
  MoebiusMap B = twist_map(axis(A), twist) * B0;

  SurfaceGroup g;
  g.topology = Topology::PuncturedTorus;
  g.generators = {A, B};
  g.generator_letters = "ab";
  g.curves = {{"a", "a"}, {"b", "b"}, {"ab", "ab"}, {"aab", "aab"}, {"abb", "abb"}};
  g.pants_curves = {"a"};
  g.relators = {};
  g.origin.topology = Topology::PuncturedTorus;
  g.origin.lengths = {length};
  g.origin.twists = {twist};
  return g;
}

namespace {

SurfaceGroup genus2_group(const FNPoint& fn) {
  double l1 = fn.lengths[0], l2 = fn.lengths[1], l3 = fn.lengths[2];
  double t1 = fn.twists[0], t2 = fn.twists[1], t3 = fn.twists[2];
  auto xs = pants_generators(l1, l2, l3);
  const MoebiusMap &x1 = xs[0], &x2 = xs[1], &x3 = xs[2];

  // Second pants copy positioned across curve 1: J X1 J^{-1} = X1^{-1}.
  MoebiusMap j0(0, -1, 1, 0);
  MoebiusMap j = twist_map(axis(x1), t1) * j0;
  MoebiusMap y2 = j * x2 * j.inverse();
  MoebiusMap y3 = j * x3 * j.inverse();

  // Crossing transversals: T_k conjugates the far-side boundary word to the
  // near-side inverse; the twist offset slides along the shared axis.
  MoebiusMap c2 = twist_map(axis(x2), t2) * conjugating_map(y2, x2.inverse());
  MoebiusMap c3 = twist_map(axis(x3), t3) * conjugating_map(y3, x3.inverse());

  SurfaceGroup g;
  g.topology = Topology::Genus2;
  g.generators = {x1, x2, c2, c3};
  g.generator_letters = "abcd";
  g.curves = {{"c1", "a"}, {"c2", "b"}, {"c3", "AB"}, {"t2", "c"}, {"t3", "d"}, {"t23", "cD"}};
  g.pants_curves = {"c1", "c2", "c3"};
  g.relators = {"DbadCBcA"};
  g.origin = fn;
  return g;
}

}  // namespace

SurfaceGroup build_surface(const FNPoint& fn) {
  fn.validate();
  switch (fn.topology) {
    case Topology::PuncturedTorus:
      return punctured_torus_group(fn.lengths[0], fn.twists[0]);
    case Topology::Genus2:
      return genus2_group(fn);
  }
  throw std::domain_error(
      "unsupported decomposition; supported: punctured_torus (1 curve), genus2 (2 pants, 3 "
      "curves)");
}

double curve_length(const SurfaceGroup& g, const std::string& word_or_label) {
  std::string word = resolve_word(g, word_or_label);
  Letters w = free_reduce(parse_letters(g, word));
  if (w.empty()) throw std::domain_error("curve_length: empty (trivial) word \"" + word + "\"");
  MoebiusMap m = letters_matrix(g, w);
  MapClass k = classify(m);
  if (k == MapClass::Parabolic) {
    throw std::domain_error("curve_length: word \"" + word +
                            "\" is parabolic (peripheral class)");
  }
  if (k == MapClass::Elliptic) {
    throw std::domain_error("curve_length: word \"" + word + "\" is elliptic (torsion class)");
  }
  return translation_length(m);
}

SurfaceGroup perturbed_group(const FNPoint& fn, std::size_t index, double step) {
  fn.validate();
  std::size_t n = fn.num_curves();
  if (index >= 2 * n) {
    throw std::domain_error("perturbed_group: coordinate index " + std::to_string(index) +
                            " out of range (have " + std::to_string(2 * n) + ")");
  }
  FNPoint moved = fn;
  if (index < n) {
    moved.lengths[index] += step;
    if (!(moved.lengths[index] > 0)) {
      throw std::domain_error("perturbed_group: length would become non-positive");
    }
  } else {
    moved.twists[index - n] += step;
  }
  return build_surface(moved);
}

SurfaceGroup twist_deformed(const SurfaceGroup& g, const std::string& curve, double t) {
  if (g.topology != Topology::PuncturedTorus) {
    throw std::domain_error("twist_deformed: implemented for the punctured torus only");
  }
  SurfaceGroup out = g;
  out.ball_cache.reset();
  const MoebiusMap& A = g.generators[0];
  const MoebiusMap& B = g.generators[1];
  if (curve == "a") {
    out.generators[1] = twist_map(axis(A), t) * B;
    out.origin.twists[0] += t;
    return out;
  }
  if (curve == "b") {
    out.generators[0] = twist_map(axis(B), t) * A;
    return out;
  }
  throw std::domain_error("twist_deformed: unknown simple curve \"" + curve +
                          "\" (expected \"a\" or \"b\")");
}

namespace {

Topology topology_from_string(const std::string& s) {
  if (s == "punctured_torus") return Topology::PuncturedTorus;
  if (s == "genus2") return Topology::Genus2;
  throw std::domain_error("unsupported decomposition \"" + s +
                          "\"; supported: punctured_torus, genus2");
}

}  // namespace

FNPoint fn_point_from_json(const std::string& json_text, std::vector<std::string>* probes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::domain_error(std::string("surface spec: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::domain_error("surface spec: expected a JSON object");
  static const std::vector<std::string> known = {"topology", "lengths", "twists", "probes"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw std::domain_error("surface spec: unknown key \"" + it.key() + "\"");
    }
  }
  if (!j.contains("topology") || !j.contains("lengths") || !j.contains("twists")) {
    throw std::domain_error("surface spec: required keys: topology, lengths, twists");
  }
  FNPoint fn;
  fn.topology = topology_from_string(j.at("topology").get<std::string>());
  fn.lengths = j.at("lengths").get<std::vector<double>>();
  fn.twists = j.at("twists").get<std::vector<double>>();
  if (probes && j.contains("probes")) {
    *probes = j.at("probes").get<std::vector<std::string>>();
  }
  fn.validate();
  return fn;
}

SurfaceGroup surface_from_json(const std::string& json_text) {
  std::vector<std::string> probes;
  FNPoint fn = fn_point_from_json(json_text, &probes);
  SurfaceGroup g = build_surface(fn);
  for (const std::string& p : probes) {
    parse_letters(g, p);  // validate alphabet before storing
    g.curves[p] = p;
  }
  return g;
}

std::pair<double, double> torus_fn_coordinates(const MoebiusMap& A, const MoebiusMap& B) {
  double x = std::abs(A.trace());
  if (!(x > 2)) throw std::domain_error("torus_fn_coordinates: \"a\" is not hyperbolic");
  double length = 2.0 * std::acosh(x / 2.0);
  double q = std::exp(length / 2);
  double y0 = x / std::sqrt(x - 2.0);
  double alpha = y0 / (q + 1.0);
  double delta = y0 * q / (q + 1.0);
  // tr B(tau) = alpha e^{tau/2} + delta e^{-tau/2}; invert for tau and pick
  // the branch whose rebuilt tr(AB) matches.
  double yb = std::abs(B.trace());
  double disc = yb * yb - 4.0 * alpha * delta;
  if (disc < 0) disc = 0;
  double root = std::sqrt(disc);
  double zab = std::abs((A * B).trace());
  double best_tau = 0;
  double best_err = 1e300;
  for (double e_half : {(yb + root) / (2 * alpha), (yb - root) / (2 * alpha)}) {
    if (!(e_half > 0)) continue;
    double tau = 2.0 * std::log(e_half);
    SurfaceGroup cand = punctured_torus_group(length, tau);
    double z = std::abs((cand.generators[0] * cand.generators[1]).trace());
    double err = std::abs(z - zab);
    if (err < best_err) {
      best_err = err;
      best_tau = tau;
    }
  }
  return {length, best_tau};
}

}  // namespace wplab
