#include "wplab/pairings.hpp"

#include <cmath>
#include <numbers>

namespace wplab {

double riera_summand(double u) {
  return u * std::log(std::abs((u + 1.0) / (u - 1.0))) - 2.0;
}

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

bool words_equal(const SurfaceGroup& g, const std::string& alpha, const std::string& beta) {
  return free_reduce(parse_letters(g, resolve_word(g, alpha))) ==
         free_reduce(parse_letters(g, resolve_word(g, beta)));
}

}  // namespace

PairingValue riera_pairing(const SurfaceGroup& g, const std::string& alpha,
                           const std::string& beta, const EnumConfig& cfg) {
  DoubleCosets dc = double_cosets(g, alpha, beta, cfg);
  bool same = words_equal(g, alpha, beta);

  std::vector<double> terms, newest;
  terms.reserve(dc.reps.size());
  int crossings = 0;
  for (const DoubleCosetRep& r : dc.reps) {
    double f = riera_summand(r.u);
    terms.push_back(f);
    if (r.kind == LineKind::Crossing) ++crossings;
    if (r.first_depth == cfg.depth) newest.push_back(f);
  }

  PairingValue out;
  out.report = dc.report;
  out.crossings = crossings;
  double series = compensated_sum(terms);
  double delta_term = same ? curve_length(g, alpha) : 0.0;
  out.value = kTwoOverPi * (delta_term + series);
  out.report.last_shell = kTwoOverPi * compensated_sum(newest);
  out.report.stabilized = std::abs(out.report.last_shell) < cfg.shell_tolerance;
  return out;
}

PairingValue cosine_twist_pairing(const SurfaceGroup& g, const std::string& alpha,
                                  const std::string& beta, const EnumConfig& cfg) {
  DoubleCosets dc = double_cosets(g, alpha, beta, cfg);

  std::vector<double> terms, newest;
  int crossings = 0;
  for (const DoubleCosetRep& r : dc.reps) {
    if (r.kind != LineKind::Crossing) continue;
    ++crossings;
    terms.push_back(r.signed_cos);
    if (r.first_depth == cfg.depth) newest.push_back(r.signed_cos);
  }

  PairingValue out;
  out.report = dc.report;
  out.crossings = crossings;
  out.value = -2.0 * compensated_sum(terms);
  out.report.last_shell = -2.0 * compensated_sum(newest);
  out.report.stabilized = std::abs(out.report.last_shell) < cfg.shell_tolerance;
  return out;
}

GramData gram_gradients(const SurfaceGroup& g, const std::vector<std::string>& curves,
                        const EnumConfig& cfg) {
  if (curves.empty()) throw std::domain_error("gram_gradients: need at least one curve");
  const auto n = static_cast<Eigen::Index>(curves.size());
  GramData out;
  out.labels = curves;
  out.gradients.resize(n, n);
  out.twists.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      PairingValue pg = riera_pairing(g, curves[static_cast<std::size_t>(i)],
                                      curves[static_cast<std::size_t>(j)], cfg);
      PairingValue pt = cosine_twist_pairing(g, curves[static_cast<std::size_t>(i)],
                                             curves[static_cast<std::size_t>(j)], cfg);
      out.gradients(i, j) = pg.value;
      out.twists(i, j) = pt.value;
      out.stabilized = out.stabilized && pg.report.stabilized;
    }
  }
  out.sym_residual = (out.gradients - out.gradients.transpose()).cwiseAbs().maxCoeff();
  return out;
}

double lambda_norm_sq(const SurfaceGroup& g, const std::string& alpha, const EnumConfig& cfg) {
  double ell = curve_length(g, alpha);
  return riera_pairing(g, alpha, alpha, cfg).value / (4.0 * ell);
}

}  // namespace wplab
