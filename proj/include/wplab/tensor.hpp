#pragma once

#include <functional>

#include "wplab/pairings.hpp"

namespace wplab {

// WP metric data at one FN point, in the coordinate basis
// (l_1..l_N, tau_1..tau_N).
struct MetricSample {
  FNPoint at;
  Eigen::MatrixXd cometric;  // h: pairings of coordinate differentials
  Eigen::MatrixXd metric;    // g = h^{-1}
  double residual = 0;       // inf-norm residual of the pairing system
  double condition = 0;      // singular-value ratio of the system
  double min_eigenvalue = 0; // smallest eigenvalue of h
};

struct ComplexStructureSample {
  Eigen::MatrixXd J;
  double square_residual = 0;  // ||J^2 + I||_inf
  double compat_residual = 0;  // ||J^T g J - g||_inf / ||g||_inf
};

struct ChristoffelSample {
  FNPoint at;
  std::vector<Eigen::MatrixXd> gamma;  // gamma[k](i,j) = Gamma^k_{ij}
  double step = 0;
  double compatibility_residual = 0;   // ||nabla g||_inf
  Eigen::MatrixXd metric;
  Eigen::MatrixXd metric_inv;
};

// Central-difference row of d(length of `word`) in FN coordinates; the row of
// a pants curve against itself is exactly a unit vector.
Eigen::RowVectorXd length_differential(const FNPoint& fn, const std::string& word,
                                       double step);

// Solve d l_u . h . d l_v^T = G[u][v] for the symmetric cometric h over all
// probe pairs (least squares), then g = h^{-1}. Underdetermined systems and
// indefinite solutions are hard errors.
MetricSample reconstruct_cometric(const FNPoint& fn, const std::vector<std::string>& probes,
                                  const EnumConfig& cfg, double fd_step);

// Memoizing field of metric samples over the chart; safe to share.
using MetricField = std::function<MetricSample(const FNPoint&)>;
MetricField reconstruction_field(const std::vector<std::string>& probes, const EnumConfig& cfg,
                                 double fd_step);

// J with J(d/dtau_j) = -1/2 h e_{l_j}, extended by J^2 = -I.
ComplexStructureSample complex_structure(const MetricSample& sample);

// Max-norm relative residual of the lowered Kahler form against the constant
// block matrix of (1/2) sum dl_j ^ dtau_j.
double kahler_check(const MetricSample& sample, const Eigen::MatrixXd& J);

ChristoffelSample christoffels(const FNPoint& fn, const MetricField& field, double grid_step);

struct ConnectionCheck {
  Eigen::VectorXd measured;   // D_U lambda in coordinates
  Eigen::VectorXd predicted;  // 3 l^{-1/2} <J lambda, U> J lambda
  double gap = 0;             // g-norm of the difference
  double measured_norm = 0;
  double predicted_norm = 0;
};

// Compares the finite-difference covariant derivative of lambda = grad l^{1/2}
// of pants curve `curve_index` against the small-length expansion, along the
// g-normalized direction of u_raw.
ConnectionCheck connection_expansion_check(const FNPoint& fn, std::size_t curve_index,
                                           const Eigen::VectorXd& u_raw,
                                           const MetricField& field, double grid_step);

// Covariant Hessian of f = length(word) (or its square when `squared`),
// Hess f(e_i, e_j) = d_i d_j f - Gamma^k_{ij} d_k f.
Eigen::MatrixXd hessian_of_length(const FNPoint& fn, const std::string& word,
                                  const MetricField& field, double grid_step, bool squared);

// Gaussian curvature of a 2D metric field by the Brioschi finite-difference
// formula on a 3x3 stencil.
using PlaneMetric = std::function<Eigen::Matrix2d(double, double)>;
double gaussian_curvature_2d(const PlaneMetric& metric, double x, double y, double step);

// Punctured-torus WP curvature at fn (dimension 2: sectional = Gaussian).
double curvature_2d(const FNPoint& fn, const MetricField& field, double grid_step);

}  // namespace wplab
