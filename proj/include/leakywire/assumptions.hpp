#pragma once

// Sampled audits of the chord-arc bound (a1), the asymptotic straightness
// condition (a2) and the curvature decay exponent.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "leakywire/curve.hpp"
#include "leakywire/error.hpp"
#include "leakywire/parallel.hpp"

namespace leakywire {

/// Parameters of (a2) and the smallest sampled d that satisfies it.
struct A2Certificate {
  double omega = 0.5;
  double epsilon = 1.0;
  double mu = 1.0;
  double d = 0.0;
  double max_violation = 0.0;
  std::size_t n_pairs = 0;  // sampled pairs in S
};

struct AssumptionReport {
  double c_estimate = 1.0;
  std::optional<A2Certificate> a2_certificate;
  std::optional<double> beta_fit;
  bool pass_a1 = false;
  bool pass_a2 = false;
  bool pass_decay = false;
  ArcInterval s_range{0.0, 0.0};
  std::size_t n_samples = 0;
};

/// xi(omega) = (1 + omega) / (1 - omega).
inline double xi_of(double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw DomainError("curve", "omega must lie in (0, 1)");
  return (1.0 + omega) / (1.0 - omega);
}

/// Membership of (s, s') in S_{omega, epsilon}. A pair with |s + s'| exactly
/// on the threshold belongs to neither branch.
inline bool in_S(double s, double sp, double omega, double epsilon) {
  const double sum = std::abs(s + sp);
  const double threshold = xi_of(omega) * epsilon;
  if (sum > threshold) {
    if (sp == 0.0 || s == 0.0) return false;
    const double q = s / sp;
    return omega < q && q < 1.0 / omega;
  }
  if (sum < threshold) return std::abs(s - sp) < epsilon;
  return false;
}

namespace detail {

inline std::vector<double> linspace(ArcInterval r, std::size_t n) {
  if (n < 2) throw DomainError("curve", "need at least 2 samples");
  if (!(r.hi > r.lo)) throw DomainError("curve", "empty sampling range");
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return s;
}

inline std::vector<Vec3> sample_points(const Curve& c, const std::vector<double>& s) {
  std::vector<Vec3> p(s.size());
  parallel_for(s.size(), [&](std::size_t i) { p[i] = c.point(s[i]); });
  return p;
}

}  // namespace detail

/// c_estimate = min rho/sigma over all sampled pairs.
inline AssumptionReport check_a1(const Curve& curve, ArcInterval s_range, std::size_t n_samples,
                                 double c_min = 1e-6) {
  const auto s = detail::linspace(s_range, n_samples);
  const auto p = detail::sample_points(curve, s);
  std::vector<double> row_min(n_samples, 1.0);
  parallel_for(n_samples, [&](std::size_t i) {
    double m = 1.0;
    for (std::size_t j = i + 1; j < n_samples; ++j) {
      m = std::min(m, (p[i] - p[j]).norm() / (s[j] - s[i]));
    }
    row_min[i] = m;
  });
  AssumptionReport rep;
  rep.c_estimate = std::min(1.0, *std::min_element(row_min.begin(), row_min.end()));
  rep.pass_a1 = rep.c_estimate >= c_min;
  rep.s_range = s_range;
  rep.n_samples = n_samples;
  return rep;
}

/// Pair requirement on d: (1 - rho/sigma)_+ (sigma + 1) (1 + (s^2 + s'^2)^mu)^(1/2) / sigma.
inline double a2_required_d(double s, double sp, double rho, double mu) {
  const double sigma = std::abs(s - sp);
  const double defect = std::max(0.0, 1.0 - rho / sigma);
  return defect * (sigma + 1.0) * std::sqrt(1.0 + std::pow(s * s + sp * sp, mu)) / sigma;
}

/// d is fitted on the inner half of the range and then verified on every
/// sampled pair of S; max_violation > 0 means the outer pairs need a larger d.
inline AssumptionReport check_a2(const Curve& curve, double omega, double epsilon, double mu, ArcInterval s_range,
                                 std::size_t n_samples) {
  if (!(epsilon > 0.0)) throw DomainError("curve", "epsilon must be positive");
  if (!(mu >= 0.0)) throw DomainError("curve", "mu must be nonnegative");
  (void)xi_of(omega);
  const auto s = detail::linspace(s_range, n_samples);
  const auto p = detail::sample_points(curve, s);
  const double inner = 0.5 * std::max(std::abs(s_range.lo), std::abs(s_range.hi));

  struct RowStat {
    double inner_d = 0.0;
    double all_d = 0.0;
    std::size_t count = 0;
  };
  std::vector<RowStat> rows(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    RowStat st;
    for (std::size_t j = 0; j < n_samples; ++j) {
      if (i == j || !in_S(s[i], s[j], omega, epsilon)) continue;
      const double need = a2_required_d(s[i], s[j], (p[i] - p[j]).norm(), mu);
      ++st.count;
      st.all_d = std::max(st.all_d, need);
      if (std::abs(s[i]) <= inner && std::abs(s[j]) <= inner) st.inner_d = std::max(st.inner_d, need);
    }
    rows[i] = st;
  });
  A2Certificate cert{omega, epsilon, mu, 0.0, 0.0, 0};
  double all_d = 0.0;
  for (const auto& r : rows) {
    cert.d = std::max(cert.d, r.inner_d);
    all_d = std::max(all_d, r.all_d);
    cert.n_pairs += r.count;
  }
  cert.max_violation = all_d - cert.d;
  AssumptionReport rep;
  rep.a2_certificate = cert;
  rep.pass_a2 = cert.max_violation <= 0.0;
  rep.s_range = s_range;
  rep.n_samples = n_samples;
  return rep;
}

struct DecayFit {
  double beta = std::numeric_limits<double>::infinity();
  bool super_polynomial = false;
  bool pass = true;
  std::size_t n_points = 0;
};

namespace detail {

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw FitError("curve", "degenerate log-log regression");
  return (n * sxy - sx * sy) / den;
}

}  // namespace detail

/// Fit log k = -beta log|s| + const on |s| >= half the largest |s|.
/// The result is +infinity for an all-zero tail or super-polynomial decay
/// (the far-half slope exceeds the near-half slope by 25%).
inline DecayFit check_curvature_decay(const std::vector<double>& s, const std::vector<double>& k) {
  if (s.size() != k.size()) throw DomainError("curve", "curvature samples and positions differ in length");
  double smax = 0.0;
  for (double v : s) smax = std::max(smax, std::abs(v));
  std::vector<std::pair<double, double>> tail;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = std::abs(s[i]);
    if (a >= 0.5 * smax && a > 0.0 && k[i] > 0.0 && std::isfinite(std::log(k[i]))) {
      tail.emplace_back(std::log(a), std::log(k[i]));
    }
  }
  DecayFit fit;
  fit.n_points = tail.size();
  if (tail.size() < 3) return fit;
  std::sort(tail.begin(), tail.end());
  auto slope_of = [](auto first, auto last) {
    std::vector<double> x, y;
    for (auto it = first; it != last; ++it) {
      x.push_back(it->first);
      y.push_back(it->second);
    }
    return -detail::ls_slope(x, y);
  };
  fit.beta = slope_of(tail.begin(), tail.end());
  if (tail.size() >= 6) {
    const auto mid = tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2);
    const double near = slope_of(tail.begin(), mid);
    const double far = slope_of(mid, tail.end());
    // Distinct |s| values are needed on both halves for the comparison.
    if (near > 0.0 && far > 1.25 * near) {
      fit.super_polynomial = true;
      fit.beta = std::numeric_limits<double>::infinity();
    }
  }
  fit.pass = fit.beta > 1.25;
  return fit;
}

inline DecayFit check_curvature_decay(const Curve& curve, ArcInterval s_range, std::size_t n_samples) {
  const auto s = detail::linspace(s_range, n_samples);
  std::vector<double> k(s.size());
  parallel_for(s.size(), [&](std::size_t i) { k[i] = curve.curvature(s[i]); });
  return check_curvature_decay(s, k);
}

/// All three audits with one report.
inline AssumptionReport audit_assumptions(const Curve& curve, ArcInterval s_range, std::size_t n_samples,
                                          double omega, double epsilon, double mu) {
  AssumptionReport rep = check_a1(curve, s_range, n_samples);
  const AssumptionReport a2 = check_a2(curve, omega, epsilon, mu, s_range, n_samples);
  rep.a2_certificate = a2.a2_certificate;
  rep.pass_a2 = a2.pass_a2;
  const DecayFit fit = check_curvature_decay(curve, s_range, n_samples);
  rep.beta_fit = fit.beta;
  rep.pass_decay = fit.pass;
  return rep;
}

}  // namespace leakywire
