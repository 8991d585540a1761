#include "wplab/tensor.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace wplab {

namespace {

std::size_t coordinate_count(const FNPoint& fn) { return 2 * fn.num_curves(); }

FNPoint shifted(const FNPoint& fn, std::size_t index, double step) {
  FNPoint out = fn;
  std::size_t n = fn.num_curves();
  if (index < n) {
    out.lengths[index] += step;
    if (!(out.lengths[index] > 0)) {
      throw std::domain_error("metric stencil leaves the l > 0 chart");
    }
  } else {
    out.twists[index - n] += step;
  }
  return out;
}

// Index of the pants curve whose word equals this probe, or -1.
int pants_curve_index(const SurfaceGroup& g, const std::string& probe) {
  std::string word = resolve_word(g, probe);
  for (std::size_t j = 0; j < g.pants_curves.size(); ++j) {
    if (resolve_word(g, g.pants_curves[j]) == word) return static_cast<int>(j);
  }
  return -1;
}

}  // namespace

Eigen::RowVectorXd length_differential(const FNPoint& fn, const std::string& word,
                                       double step) {
  fn.validate();
  std::size_t n = coordinate_count(fn);
  SurfaceGroup base = build_surface(fn);
  Eigen::RowVectorXd row(n);
  int self = pants_curve_index(base, word);
  if (self >= 0) {
    row.setZero();
    row(self) = 1.0;  // the length coordinate itself
    return row;
  }
  for (std::size_t i = 0; i < n; ++i) {
    SurfaceGroup plus = perturbed_group(fn, i, step);
    SurfaceGroup minus = perturbed_group(fn, i, -step);
    row(static_cast<Eigen::Index>(i)) =
        (curve_length(plus, word) - curve_length(minus, word)) / (2 * step);
  }
  return row;
}

MetricSample reconstruct_cometric(const FNPoint& fn, const std::vector<std::string>& probes,
                                  const EnumConfig& cfg, double fd_step) {
  fn.validate();
  if (probes.empty()) throw std::domain_error("reconstruct_cometric: no probes");
  const std::size_t n = coordinate_count(fn);
  const std::size_t unknowns = n * (n + 1) / 2;
  const std::size_t pairs = probes.size() * (probes.size() + 1) / 2;
  if (pairs < unknowns) {
    std::ostringstream os;
    os << "reconstruct_cometric: " << probes.size() << " probes give " << pairs
       << " equations for " << unknowns << " unknowns";
    throw std::domain_error(os.str());
  }

  SurfaceGroup g = build_surface(fn);
  GramData gram = gram_gradients(g, probes, cfg);

  std::vector<Eigen::RowVectorXd> rows;
  rows.reserve(probes.size());
  for (const auto& p : probes) rows.push_back(length_differential(fn, p, fd_step));

  // Unknown ordering: (i, j) with i <= j.
  auto flat = [n](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  };
  Eigen::MatrixXd A(pairs, unknowns);
  Eigen::VectorXd b(pairs);
  std::size_t row_idx = 0;
  for (std::size_t u = 0; u < probes.size(); ++u) {
    for (std::size_t v = u; v < probes.size(); ++v, ++row_idx) {
      A.row(static_cast<Eigen::Index>(row_idx)).setZero();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          double coeff = rows[u](static_cast<Eigen::Index>(i)) *
                         rows[v](static_cast<Eigen::Index>(j));
          if (i != j) {
            coeff += rows[u](static_cast<Eigen::Index>(j)) *
                     rows[v](static_cast<Eigen::Index>(i));
          }
          A(static_cast<Eigen::Index>(row_idx), static_cast<Eigen::Index>(flat(i, j))) +=
              coeff;
        }
      }
      b(static_cast<Eigen::Index>(row_idx)) =
          0.5 * (gram.gradients(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) +
                 gram.gradients(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)));
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > smax * 1e-10)) {
    // Name the undetermined direction by its dominant cometric entries.
    Eigen::VectorXd null_dir = svd.matrixV().col(sv.size() - 1);
    std::ostringstream os;
    os << "reconstruct_cometric: probe set leaves the system rank-deficient; "
       << "undetermined direction dominated by entries";
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        if (std::abs(null_dir(static_cast<Eigen::Index>(flat(i, j)))) >
            0.5 / std::sqrt(static_cast<double>(unknowns))) {
          os << " h[" << i << "][" << j << "]";
        }
      }
    }
    throw std::domain_error(os.str());
  }
  Eigen::VectorXd x = svd.solve(b);

  MetricSample out;
  out.at = fn;
  out.condition = smax / smin;
  out.residual = (A * x - b).cwiseAbs().maxCoeff();
  out.cometric.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      out.cometric(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          out.cometric(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
              x(static_cast<Eigen::Index>(flat(i, j)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.cometric);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (!(out.min_eigenvalue > 0)) {
    std::ostringstream os;
    os << "reconstruct_cometric: solution not positive definite (min eigenvalue "
       << out.min_eigenvalue << "); suspect enumeration depth too small";
    throw std::domain_error(os.str());
  }
  out.metric = out.cometric.inverse();
  return out;
}

MetricField reconstruction_field(const std::vector<std::string>& probes, const EnumConfig& cfg,
                                 double fd_step) {
  struct Cache {
    std::mutex mu;
    std::map<std::vector<long long>, MetricSample> samples;
  };
  auto cache = std::make_shared<Cache>();
  return [probes, cfg, fd_step, cache](const FNPoint& fn) {
    std::vector<long long> key;
    key.reserve(2 * fn.num_curves() + 1);
    key.push_back(static_cast<long long>(fn.topology));
    for (double l : fn.lengths) key.push_back(llround(l * 1e12));
    for (double t : fn.twists) key.push_back(llround(t * 1e12));
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->samples.find(key);
      if (it != cache->samples.end()) return it->second;
    }
    MetricSample s = reconstruct_cometric(fn, probes, cfg, fd_step);
    std::lock_guard<std::mutex> lock(cache->mu);
    return cache->samples.emplace(key, std::move(s)).first->second;
  };
}

ComplexStructureSample complex_structure(const MetricSample& sample) {
  const Eigen::Index n = sample.cometric.rows();
  const Eigen::Index half = n / 2;
  // Images J(d/dtau_j) = -1/2 grad l_j = -1/2 h e_{l_j}.
  Eigen::MatrixXd V = -0.5 * sample.cometric.leftCols(half);
  Eigen::MatrixXd M(n, n);
  M.leftCols(half) = Eigen::MatrixXd::Identity(n, n).rightCols(half);  // tau basis
  M.rightCols(half) = V;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) {
    throw std::domain_error(
        "complex_structure: gradient images do not complement the twist basis "
        "(degenerate sample)");
  }
  Eigen::MatrixXd rhs(n, n);
  rhs.leftCols(half) = V;
  rhs.rightCols(half) = -Eigen::MatrixXd::Identity(n, n).rightCols(half);
  ComplexStructureSample out;
  out.J = rhs * lu.inverse();
  Eigen::MatrixXd j2 = out.J * out.J + Eigen::MatrixXd::Identity(n, n);
  out.square_residual = j2.cwiseAbs().maxCoeff();
  Eigen::MatrixXd compat = out.J.transpose() * sample.metric * out.J - sample.metric;
  out.compat_residual = compat.cwiseAbs().maxCoeff() / sample.metric.cwiseAbs().maxCoeff();
  return out;
}

double kahler_check(const MetricSample& sample, const Eigen::MatrixXd& J) {
  const Eigen::Index n = sample.metric.rows();
  const Eigen::Index half = n / 2;
  // omega(e_i, e_j) = g(J e_i, e_j)
  Eigen::MatrixXd omega = J.transpose() * sample.metric;
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < half; ++j) {
    target(j, half + j) = 0.5;
    target(half + j, j) = -0.5;
  }
  return (omega - target).cwiseAbs().maxCoeff() / 0.5;
}

ChristoffelSample christoffels(const FNPoint& fn, const MetricField& field, double grid_step) {
  const std::size_t n = coordinate_count(fn);
  MetricSample center = field(fn);
  std::vector<Eigen::MatrixXd> dg(n);
  for (std::size_t i = 0; i < n; ++i) {
    MetricSample plus = field(shifted(fn, i, grid_step));
    MetricSample minus = field(shifted(fn, i, -grid_step));
    dg[i] = (plus.metric - minus.metric) / (2 * grid_step);
  }
  ChristoffelSample out;
  out.at = fn;
  out.step = grid_step;
  out.metric = center.metric;
  out.metric_inv = center.cometric;  // h = g^{-1} by construction
  out.gamma.assign(n, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double sum = 0;
        for (std::size_t l = 0; l < n; ++l) {
          sum += out.metric_inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
                 (dg[i](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) +
                  dg[j](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) -
                  dg[l](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out.gamma[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            out.gamma[k](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                0.5 * sum;
      }
    }
  }
  // Metric compatibility: nabla_i g_jk should vanish to stencil order.
  double res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        double v = dg[i](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        for (std::size_t m = 0; m < n; ++m) {
          v -= out.gamma[m](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                   out.metric(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) +
               out.gamma[m](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                   out.metric(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m));
        }
        res = std::max(res, std::abs(v));
      }
    }
  }
  out.compatibility_residual = res;
  return out;
}

namespace {

// lambda = grad l_curve^{1/2} as a coordinate vector: h e_l / (2 sqrt(l)).
// Exact because the differential of a pants-curve length is a unit row.
Eigen::VectorXd lambda_field(const MetricSample& s, std::size_t curve_index) {
  double ell = s.at.lengths[curve_index];
  return s.cometric.col(static_cast<Eigen::Index>(curve_index)) / (2.0 * std::sqrt(ell));
}

}  // namespace

ConnectionCheck connection_expansion_check(const FNPoint& fn, std::size_t curve_index,
                                           const Eigen::VectorXd& u_raw,
                                           const MetricField& field, double grid_step) {
  const std::size_t n = coordinate_count(fn);
  if (curve_index >= fn.num_curves()) {
    throw std::domain_error("connection_expansion_check: bad curve index");
  }
  MetricSample center = field(fn);
  ChristoffelSample chr = christoffels(fn, field, grid_step);
  Eigen::VectorXd u = u_raw;
  double norm = std::sqrt(u.dot(center.metric * u));
  if (!(norm > 0)) throw std::domain_error("connection_expansion_check: zero direction");
  u /= norm;

  Eigen::VectorXd lam = lambda_field(center, curve_index);
  std::vector<Eigen::VectorXd> dlam(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd lp = lambda_field(field(shifted(fn, i, grid_step)), curve_index);
    Eigen::VectorXd lm = lambda_field(field(shifted(fn, i, -grid_step)), curve_index);
    dlam[i] = (lp - lm) / (2 * grid_step);
  }
  Eigen::VectorXd measured = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) measured += u(static_cast<Eigen::Index>(i)) * dlam[i];
  for (std::size_t k = 0; k < n; ++k) {
    double v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        v += chr.gamma[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
             u(static_cast<Eigen::Index>(i)) * lam(static_cast<Eigen::Index>(j));
      }
    }
    measured(static_cast<Eigen::Index>(k)) += v;
  }

  ComplexStructureSample cs = complex_structure(center);
  Eigen::VectorXd jlam = cs.J * lam;
  double ell = fn.lengths[curve_index];
  double coeff = 3.0 / std::sqrt(ell) * jlam.dot(center.metric * u);
  Eigen::VectorXd predicted = coeff * jlam;

  ConnectionCheck out;
  out.measured = measured;
  out.predicted = predicted;
  Eigen::VectorXd diff = measured - predicted;
  out.gap = std::sqrt(diff.dot(center.metric * diff));
  out.measured_norm = std::sqrt(measured.dot(center.metric * measured));
  out.predicted_norm = std::sqrt(predicted.dot(center.metric * predicted));
  return out;
}

Eigen::MatrixXd hessian_of_length(const FNPoint& fn, const std::string& word,
                                  const MetricField& field, double grid_step, bool squared) {
  const std::size_t n = coordinate_count(fn);
  auto f = [&](const FNPoint& x) {
    double v = curve_length(build_surface(x), word);
    return squared ? v * v : v;
  };
  double f0 = f(fn);
  Eigen::VectorXd df(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd d2f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double fp = f(shifted(fn, i, grid_step));
    double fm = f(shifted(fn, i, -grid_step));
    df(static_cast<Eigen::Index>(i)) = (fp - fm) / (2 * grid_step);
    d2f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        (fp - 2 * f0 + fm) / (grid_step * grid_step);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double fpp = f(shifted(shifted(fn, i, grid_step), j, grid_step));
      double fpm = f(shifted(shifted(fn, i, grid_step), j, -grid_step));
      double fmp = f(shifted(shifted(fn, i, -grid_step), j, grid_step));
      double fmm = f(shifted(shifted(fn, i, -grid_step), j, -grid_step));
      double v = (fpp - fpm - fmp + fmm) / (4 * grid_step * grid_step);
      d2f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      d2f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  ChristoffelSample chr = christoffels(fn, field, grid_step);
  Eigen::MatrixXd hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = d2f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (std::size_t k = 0; k < n; ++k) {
        v -= chr.gamma[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
             df(static_cast<Eigen::Index>(k));
      }
      hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return hess;
}

double gaussian_curvature_2d(const PlaneMetric& metric, double x, double y, double step) {
  double h = step;
  Eigen::Matrix2d m[3][3];
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      m[i + 1][j + 1] = metric(x + i * h, y + j * h);
    }
  }
  auto E = [&](int i, int j) { return m[i + 1][j + 1](0, 0); };
  auto F = [&](int i, int j) { return m[i + 1][j + 1](0, 1); };
  auto G = [&](int i, int j) { return m[i + 1][j + 1](1, 1); };

  double E0 = E(0, 0), F0 = F(0, 0), G0 = G(0, 0);
  double Eu = (E(1, 0) - E(-1, 0)) / (2 * h);
  double Ev = (E(0, 1) - E(0, -1)) / (2 * h);
  double Gu = (G(1, 0) - G(-1, 0)) / (2 * h);
  double Gv = (G(0, 1) - G(0, -1)) / (2 * h);
  double Fu = (F(1, 0) - F(-1, 0)) / (2 * h);
  double Fv = (F(0, 1) - F(0, -1)) / (2 * h);
  double Evv = (E(0, 1) - 2 * E0 + E(0, -1)) / (h * h);
  double Guu = (G(1, 0) - 2 * G0 + G(-1, 0)) / (h * h);
  double Fuv = (F(1, 1) - F(1, -1) - F(-1, 1) + F(-1, -1)) / (4 * h * h);

  Eigen::Matrix3d m1, m2;
  m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
      Fv - 0.5 * Gu, E0, F0,
      0.5 * Gv, F0, G0;
  m2 << 0, 0.5 * Ev, 0.5 * Gu,
      0.5 * Ev, E0, F0,
      0.5 * Gu, F0, G0;
  double det_g = E0 * G0 - F0 * F0;
  return (m1.determinant() - m2.determinant()) / (det_g * det_g);
}

double curvature_2d(const FNPoint& fn, const MetricField& field, double grid_step) {
  if (fn.topology != Topology::PuncturedTorus) {
    throw std::domain_error("curvature_2d: punctured torus only (real dimension 2)");
  }
  PlaneMetric metric = [&](double l, double t) {
    FNPoint p = fn;
    p.lengths[0] = l;
    p.twists[0] = t;
    return Eigen::Matrix2d(field(p).metric);
  };
  return gaussian_curvature_2d(metric, fn.lengths[0], fn.twists[0], grid_step);
}

}  // namespace wplab
