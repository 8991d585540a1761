#pragma once

#include <Eigen/Dense>

#include "wplab/enumeration.hpp"

namespace wplab {

struct PairingValue {
  double value = 0;
  TruncationReport report;
  int crossings = 0;
};

// Summand of the gradient series: u log((u+1)/(u-1)) - 2, on the real
// absolute-value branch for crossing lifts (u < 1).
double riera_summand(double u);

// <grad l_alpha, grad l_beta> = (2/pi)(l_alpha delta_ab + sum' of summands)
// over double cosets; the primed sum excludes the trivial coset when
// alpha = beta.
PairingValue riera_pairing(const SurfaceGroup& g, const std::string& alpha,
                           const std::string& beta, const EnumConfig& cfg = {});

// <grad l_alpha, J grad l_beta> = -2 sum of cos(theta_p) over the crossings,
// signed against the oriented axes.
PairingValue cosine_twist_pairing(const SurfaceGroup& g, const std::string& alpha,
                                  const std::string& beta, const EnumConfig& cfg = {});

struct GramData {
  std::vector<std::string> labels;
  Eigen::MatrixXd gradients;  // G[i][j] = riera_pairing(i, j)
  Eigen::MatrixXd twists;     // S[i][j] = cosine_twist_pairing(i, j)
  double sym_residual = 0;    // max |G - G^T|
  bool stabilized = true;     // all entries stabilized at this depth
};

GramData gram_gradients(const SurfaceGroup& g, const std::vector<std::string>& curves,
                        const EnumConfig& cfg = {});

// ||grad l_alpha^{1/2}||^2 = riera(alpha, alpha) / (4 l_alpha).
double lambda_norm_sq(const SurfaceGroup& g, const std::string& alpha,
                      const EnumConfig& cfg = {});

}  // namespace wplab
