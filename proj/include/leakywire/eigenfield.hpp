#pragma once

// Eigenfunction f = R h reconstructed from a Birman-Schwinger vector h, its
// traces on shifted curves and the generalized boundary values xi and omega.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "leakywire/curve.hpp"
#include "leakywire/error.hpp"
#include "leakywire/operators.hpp"
#include "leakywire/parallel.hpp"

namespace leakywire {

struct FieldSample {
  Vec3 point;
  double value;
};

/// Free Green's function e^{-kappa R} / (4 pi R).
inline double green3(double R, double kappa) { return std::exp(-kappa * R) / (4.0 * std::numbers::pi * R); }

/// f(x) = (1/4pi) int e^{-kappa|x - gamma(s)|} / |x - gamma(s)| h(s) ds for h given
/// on the grid nodes.
class FieldReconstructor {
 public:
  FieldReconstructor(const Curve& curve, const GridSpec& grid, double kappa, Eigen::VectorXd h)
      : curve_(curve), grid_(grid), kappa_(kappa), h_(std::move(h)), points_(grid_points(curve, grid)) {
    require_positive_kappa(kappa);
    if (static_cast<std::size_t>(h_.size()) != grid.N()) throw DomainError("eigenfield", "h does not match the grid");
    if (grid.N() >= 5) spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(h_.data(), grid.N(), grid.node(0), grid.delta());
  }

  const GridSpec& grid() const { return grid_; }
  double kappa() const { return kappa_; }

  /// Cubic B-spline interpolant of h, held constant beyond the outer nodes.
  double h_at(double s) const {
    const double lo = grid_.node(0), hi = grid_.node(grid_.N() - 1);
    if (grid_.N() < 5) return h_(0);
    return spline_(std::clamp(s, lo, hi));
  }

  /// Midpoint sum over the nodes; valid when x is farther than Delta/10 from every node.
  double nodal(const Vec3& x) const {
    const double delta = grid_.delta();
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double R = (x - points_[i]).norm();
      if (R < 0.1 * delta) {
        throw NearSingularityError("eigenfield", "field point within Delta/10 of the curve; use trace_on_shifted");
      }
      acc += green3(R, kappa_) * h_(static_cast<Eigen::Index>(i));
    }
    return delta * acc;
  }

  /// Adaptive quadrature of the integral with h interpolated; panels are
  /// graded geometrically around s_foot starting at the scale r.
  double resolved(const Vec3& x, double s_foot, double r) const {
    const double L = grid_.L();
    auto integrand = [&](double s) { return green3((x - curve_.point(s)).norm(), kappa_) * h_at(s); };
    std::vector<double> br{-L, L};
    if (s_foot > -L && s_foot < L) br.push_back(s_foot);
    for (double w = r; w < 1.0; w *= 4.0) {
      br.push_back(s_foot - w);
      br.push_back(s_foot + w);
    }
    for (double w = 1.0; w < 2.0 * L; w += 1.0) {
      br.push_back(s_foot - w);
      br.push_back(s_foot + w);
    }
    for (auto& b : br) b = std::clamp(b, -L, L);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const std::size_t np = br.size() - 1;
    std::vector<double> coarse(np), l1(np);
    double total = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      double err = 0.0;
      coarse[k] = GK::integrate(integrand, br[k], br[k + 1], 0, 0.0, &err, &l1[k]);
      total += l1[k];
    }
    // Panels below 1e-14 of the total are not refined.
    double acc = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      acc += l1[k] < 1e-14 * total ? coarse[k] : GK::integrate(integrand, br[k], br[k + 1], 12, 1e-11);
    }
    return acc;
  }

 private:
  Curve curve_;
  GridSpec grid_;
  double kappa_;
  Eigen::VectorXd h_;
  std::vector<Vec3> points_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

/// Nodal field at points away from the curve.
inline std::vector<FieldSample> reconstruct_field(const Curve& curve, const GridSpec& grid, double kappa,
                                                  const Eigen::VectorXd& h, const std::vector<Vec3>& points) {
  const FieldReconstructor f(curve, grid, kappa, h);
  std::vector<FieldSample> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = {points[i], f.nodal(points[i])}; });
  return out;
}

struct TraceFit {
  double s = 0.0;
  std::vector<double> radii;                     // strictly decreasing
  std::vector<double> values;                    // averaged over directions
  std::vector<std::vector<double>> per_angle;    // per_angle[a][k] at radii[k]
  double xi = 0.0;
  double omega = 0.0;
  double fit_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Log-spaced radii from r_max down to r_min.
inline std::vector<double> radii_ladder(double r_min, double r_max, std::size_t count) {
  if (!(r_min > 0.0) || !(r_max > r_min) || count < 2) throw DomainError("eigenfield", "invalid radii ladder");
  std::vector<double> r(count);
  for (std::size_t k = 0; k < count; ++k) {
    r[k] = r_max * std::pow(r_min / r_max, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return r;
}

/// Trace of f on the shifted curves at radii r, averaged over n_angles equally
/// spaced directions in the normal plane at s.
inline TraceFit trace_on_shifted(const FieldReconstructor& f, const Curve& curve, double s, std::vector<double> radii,
                                 std::size_t n_angles) {
  if (n_angles < 4) throw DomainError("eigenfield", "need at least 4 angles");
  if (radii.empty()) throw DomainError("eigenfield", "empty radii list");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  if (std::adjacent_find(radii.begin(), radii.end()) != radii.end()) throw DomainError("eigenfield", "radii must be distinct");
  TraceFit t;
  t.s = s;
  t.radii = radii;
  t.values.assign(radii.size(), 0.0);
  t.per_angle.assign(n_angles, std::vector<double>(radii.size(), 0.0));
  parallel_for(n_angles * radii.size(), [&](std::size_t idx) {
    const std::size_t a = idx / radii.size(), k = idx % radii.size();
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
    t.per_angle[a][k] = f.resolved(curve.shifted_point(s, radii[k], angle), s, radii[k]);
  });
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double acc = 0.0;
    for (std::size_t a = 0; a < n_angles; ++a) acc += t.per_angle[a][k];
    t.values[k] = acc / static_cast<double>(n_angles);
  }
  return t;
}

struct XiOmega {
  double xi;
  double omega;
  double fit_residual;  // rms misfit relative to max |value|
};

/// Least squares values(r) = -xi ln r + omega.
inline XiOmega extract_xi_omega(const std::vector<double>& values, const std::vector<double>& radii) {
  if (values.size() != radii.size()) throw FitError("eigenfield", "values and radii differ in length");
  if (radii.size() < 4) throw FitError("eigenfield", "need at least 4 radii");
  const auto [mn, mx] = std::minmax_element(radii.begin(), radii.end());
  if (!(*mn > 0.0) || *mx / *mn < 3.0) throw FitError("eigenfield", "radii span less than a factor 3");
  const std::size_t n = radii.size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  double vmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    A(static_cast<Eigen::Index>(k), 0) = -std::log(radii[k]);
    A(static_cast<Eigen::Index>(k), 1) = 1.0;
    y(static_cast<Eigen::Index>(k)) = values[k];
    vmax = std::max(vmax, std::abs(values[k]));
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  const double rms = (A * c - y).norm() / std::sqrt(static_cast<double>(n));
  return {c(0), c(1), vmax > 0.0 ? rms / vmax : rms};
}

inline void fit_trace(TraceFit& t) {
  const XiOmega xo = extract_xi_omega(t.values, t.radii);
  t.xi = xo.xi;
  t.omega = xo.omega;
  t.fit_residual = xo.fit_residual;
}

struct BoundaryPoint {
  double s = 0.0;
  double h = 0.0;          // interpolated h(s)
  double xi = 0.0;
  double omega = 0.0;
  double residual = 0.0;   // |2 pi alpha xi - omega| / (|2 pi alpha xi| + |omega| + 2 pi |xi|)
  double xi_rel_error = 0.0;      // |xi - h/2pi| / |h/2pi|
  double direction_spread = 0.0;  // (max - min) / |mean| of per-angle xi
  double fit_residual = 0.0;
};

struct BoundaryReport {
  double alpha = 0.0;
  double kappa = 0.0;
  std::vector<BoundaryPoint> points;
  double max_residual = 0.0;
  double max_xi_rel_error = 0.0;
  double max_direction_spread = 0.0;
};

struct TraceOptions {
  std::vector<double> radii = radii_ladder(1e-3, 1e-2, 8);
  std::size_t n_angles = 8;
};

/// Generalized boundary condition 2 pi alpha xi = omega at each s.
inline BoundaryReport bc_report(const Curve& curve, const GridSpec& grid, double kappa, const Eigen::VectorXd& h,
                                double alpha, const std::vector<double>& s_list, const TraceOptions& opt = {}) {
  const FieldReconstructor f(curve, grid, kappa, h);
  BoundaryReport rep{alpha, kappa, {}, 0.0, 0.0, 0.0};
  const double two_pi = 2.0 * std::numbers::pi;
  for (double s : s_list) {
    TraceFit t = trace_on_shifted(f, curve, s, opt.radii, opt.n_angles);
    fit_trace(t);
    BoundaryPoint bp;
    bp.s = s;
    bp.h = f.h_at(s);
    bp.xi = t.xi;
    bp.omega = t.omega;
    bp.fit_residual = t.fit_residual;
    const double lhs = two_pi * alpha * t.xi;
    const double den = std::abs(lhs) + std::abs(t.omega) + two_pi * std::abs(t.xi);
    bp.residual = den > 0.0 ? std::abs(lhs - t.omega) / den : 0.0;
    const double expect = bp.h / two_pi;
    bp.xi_rel_error = expect != 0.0 ? std::abs(t.xi - expect) / std::abs(expect) : std::abs(t.xi);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
    for (const auto& row : t.per_angle) {
      const double xa = extract_xi_omega(row, t.radii).xi;
      lo = std::min(lo, xa);
      hi = std::max(hi, xa);
      mean += xa;
    }
    mean /= static_cast<double>(t.per_angle.size());
    bp.direction_spread = mean != 0.0 ? (hi - lo) / std::abs(mean) : hi - lo;
    rep.max_residual = std::max(rep.max_residual, bp.residual);
    rep.max_xi_rel_error = std::max(rep.max_xi_rel_error, bp.xi_rel_error);
    rep.max_direction_spread = std::max(rep.max_direction_spread, bp.direction_spread);
    rep.points.push_back(bp);
  }
  return rep;
}

inline double bc_residual(const Curve& curve, const GridSpec& grid, double kappa, const Eigen::VectorXd& h,
                          double alpha, const std::vector<double>& s_list, const TraceOptions& opt = {}) {
  return bc_report(curve, grid, kappa, h, alpha, s_list, opt).max_residual;
}

/// Modified Bessel function K_0.
inline double bessel_k0(double x) { return std::cyl_bessel_k(0.0, x); }

/// Right side of (1/4pi) e^{-kappa R}/R = (1/(2pi)^2) int K_0(sqrt(p^2 + kappa^2) r) cos(p u) dp,
/// R = sqrt(r^2 + u^2).
inline double macdonald_integral(double r, double u, double kappa) {
  if (!(r > 0.0)) throw DomainError("eigenfield", "Macdonald integral needs r > 0");
  auto integrand = [&](double p) { return bessel_k0(std::sqrt(p * p + kappa * kappa) * r) * std::cos(p * u); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double panel = std::min(1.0, 1.0 / std::max(std::abs(u), 1e-3));
  double acc = 0.0;
  for (double a = 0.0;; a += panel) {
    acc += GK::integrate(integrand, a, a + panel, 10, 1e-14);
    if (bessel_k0(std::sqrt((a + panel) * (a + panel) + kappa * kappa) * r) < 1e-17) break;
  }
  return 2.0 * acc / (4.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace leakywire
