#pragma once

#include "wplab/tensor.hpp"

namespace wplab {

// Discrete path in FN coordinates with fixed endpoints and uniform parameter.
struct DiscretePath {
  Topology topology = Topology::PuncturedTorus;
  std::vector<Eigen::VectorXd> nodes;  // coordinates (l_1..l_N, tau_1..tau_N)

  std::size_t segments() const { return nodes.size() - 1; }
};

FNPoint fn_of_coords(Topology t, const Eigen::VectorXd& x);
Eigen::VectorXd coords_of_fn(const FNPoint& fn);

// Metric evaluated directly on coordinate vectors (lattice cache or the
// direct reconstruction path).
using CoordMetric = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

CoordMetric direct_metric(Topology t, const MetricField& field);

// Bilinearly interpolated metric over a rectangular 2D lattice; the tractable
// fast path for punctured-torus geodesics.
class LatticeMetric {
 public:
  LatticeMetric(const MetricField& field, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                int nx, int ny, int threads = 0);

  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;
  CoordMetric as_metric() const;

 private:
  Eigen::Vector2d lo_, hi_;
  int nx_, ny_;
  std::vector<Eigen::Matrix2d> nodes_;
};

struct SolverConfig {
  int max_iterations = 400;
  double tolerance = 1e-8;      // relative energy decrease
  double floor_length = 0.02;   // chart floor; paths are clamped above it
};

struct SolverReport {
  std::vector<double> energy_trace;  // accepted iterations, nonincreasing
  double energy = 0;
  double length = 0;
  int iterations = 0;
  bool converged = false;
  bool clamped = false;
};

// Discrete Dirichlet energy: sum_k dx_k^T g(midpoint) dx_k / ds.
double path_energy(const DiscretePath& path, const CoordMetric& metric);
double path_length(const DiscretePath& path, const CoordMetric& metric);

struct GeodesicResult {
  DiscretePath path;
  SolverReport report;
};

// Gradient descent with backtracking line search on the interior nodes.
GeodesicResult solve_geodesic(const FNPoint& p, const FNPoint& q, int segments,
                              const CoordMetric& metric, const SolverConfig& config = {});

struct ConvexityReport {
  double min_second_difference = 0;        // of the weighted length sum
  std::vector<double> min_sqrt_second;     // per curve, of sqrt(length)
  std::vector<double> min_plain_second;    // per curve, of length
};

// Second differences of weighted geodesic-length sums along a solved path.
ConvexityReport convexity_probe(const DiscretePath& path,
                                const std::vector<std::pair<std::string, double>>& curves);

struct SublevelReport {
  double max_excess = 0;  // max over nodes of l_word - c
  bool convex = false;
};

SublevelReport sublevel_probe(const DiscretePath& path, const std::string& word, double c,
                              double tolerance = 1e-3);

// Family pinching one curve: only that coordinate tends to zero.
struct DegenerationRay {
  FNPoint base;
  std::size_t curve_index = 0;
  double ell_hi = 0.8;
  double ell_lo = 0.02;
  int points = 33;
};

struct BoundarySeries {
  std::vector<double> ells;             // descending sample levels
  std::vector<double> partial_lengths;  // WP length from ell down to ell_lo
  std::vector<double> ratios;           // (partial + sqrt(2 pi ell_lo)) / sqrt(2 pi ell)
  bool truncated = false;
};

// Integrates sqrt(g_ll) along the pure-length ray toward the boundary.
BoundarySeries boundary_distance_probe(const DegenerationRay& ray, const MetricField& field);

}  // namespace wplab
