#pragma once

// Arc-length parametrized space curves: straight lines, planar curves built
// from a curvature profile, and user-sampled parametric curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "leakywire/error.hpp"

namespace leakywire {

using Vec3 = Eigen::Vector3d;

enum class CurveFamily { StraightLine, PlanarCurvatureProfile, SampledParametric };

inline std::string to_string(CurveFamily f) {
  switch (f) {
    case CurveFamily::StraightLine: return "straight";
    case CurveFamily::PlanarCurvatureProfile: return "planar_curvature";
    case CurveFamily::SampledParametric: return "sampled";
  }
  return "unknown";
}

/// Closed interval of arc-length values.
struct ArcInterval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

/// Tangent, binormal and normal at one point; t x n = b.
struct FrenetFrame {
  Vec3 t;
  Vec3 b;
  Vec3 n;
};

/// What eval_frame does at a curvature zero.
enum class FramePolicy {
  ParallelTransportFallback,  // borrow the normal of the nearest curved point
  Strict,                     // throw DegenerateFrameError
};

/// Isometry x -> rotation * x + translation applied to a curve.
struct RigidMotion {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Signed curvature k(s) of a planar curve.
class CurvatureProfile {
 public:
  enum class Kind { Gaussian, PowerTail, Custom };

  /// k(s) = a exp(-(s/w)^2)
  static CurvatureProfile gaussian(double a, double w) {
    if (!(w > 0.0) || !std::isfinite(a)) throw DomainError("curve", "gaussian profile needs finite a and w > 0");
    CurvatureProfile p(Kind::Gaussian);
    p.params_ = {{"a", a}, {"w", w}};
    p.k_ = [a, w](double s) { const double x = s / w; return a * std::exp(-x * x); };
    return p;
  }

  /// k(s) = a (1 + s^2)^(-beta/2): smooth, with tail a |s|^-beta.
  static CurvatureProfile power_tail(double a, double beta) {
    if (!(beta > 0.0) || !std::isfinite(a)) throw DomainError("curve", "power_tail profile needs finite a and beta > 0");
    CurvatureProfile p(Kind::PowerTail);
    p.params_ = {{"a", a}, {"beta", beta}};
    p.k_ = [a, beta](double s) { return a * std::pow(1.0 + s * s, -0.5 * beta); };
    return p;
  }

  static CurvatureProfile custom(std::function<double(double)> k, double domain_hint) {
    CurvatureProfile p(Kind::Custom);
    p.params_ = {{"domain_hint", domain_hint}};
    p.k_ = std::move(k);
    p.custom_hint_ = domain_hint;
    return p;
  }

  double operator()(double s) const { return k_(s); }
  Kind kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }

  /// Half-width beyond which the curve is treated as straight.
  double default_domain_hint() const {
    switch (kind_) {
      case Kind::Gaussian: return 8.0 * params_.at("w");  // k(8w) = a e^-64
      case Kind::PowerTail: return 400.0;
      case Kind::Custom: return custom_hint_;
    }
    return 10.0;
  }

  bool identically_zero() const {
    return (kind_ == Kind::Gaussian || kind_ == Kind::PowerTail) && params_.at("a") == 0.0;
  }

 private:
  explicit CurvatureProfile(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::map<std::string, double> params_;
  std::function<double(double)> k_;
  double custom_hint_ = 10.0;
};

namespace detail {

inline double hermite(double y0, double y1, double d0, double d1, double h, double tau) {
  const double t2 = tau * tau, t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + tau) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

// Quintic Hermite interpolation from values, first and second derivatives.
inline double hermite5(double y0, double y1, double d0, double d1, double dd0, double dd1, double h, double tau) {
  const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
  return (1 - 10 * t3 + 15 * t4 - 6 * t5) * y0 + (10 * t3 - 15 * t4 + 6 * t5) * y1 +
         h * ((tau - 6 * t3 + 8 * t4 - 3 * t5) * d0 + (-4 * t3 + 7 * t4 - 3 * t5) * d1) +
         h * h * ((0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5) * dd0 + (0.5 * t3 - t4 + 0.5 * t5) * dd1);
}

/// Cubic spline through (x_i, y_i) with strictly increasing x.
class CubicSpline {
 public:
  CubicSpline() = default;
  /// Not-a-knot end conditions for n >= 4, natural ends below that.
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    const bool nak = n >= 4;
    // Tridiagonal system for m_1 .. m_{n-2}, solved by the Thomas algorithm.
    const std::size_t k = n - 2;
    std::vector<double> lo(k), di(k), up(k), r(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      lo[i - 1] = h0 / 6.0;
      di[i - 1] = (h0 + h1) / 3.0;
      up[i - 1] = h1 / 6.0;
      r[i - 1] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
    const double ha = x_[n - 2] - x_[n - 3], hb = x_[n - 1] - x_[n - 2];
    if (nak) {
      // m_0 = ((h0 + h1) m_1 - h0 m_2) / h1 and the mirror image at the far end.
      di[0] += lo[0] * (h0 + h1) / h1;
      up[0] -= lo[0] * h0 / h1;
      di[k - 1] += up[k - 1] * (ha + hb) / ha;
      lo[k - 1] -= up[k - 1] * hb / ha;
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double w = lo[i] / di[i - 1];
      di[i] -= w * up[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[k] = r[k - 1] / di[k - 1];
    for (std::size_t i = k - 1; i >= 1; --i) m_[i] = (r[i - 1] - up[i - 1] * m_[i + 1]) / di[i - 1];
    if (nak) {
      m_[0] = ((h0 + h1) * m_[1] - h0 * m_[2]) / h1;
      m_[n - 1] = ((ha + hb) * m_[n - 2] - hb * m_[n - 3]) / ha;
    }
  }

  /// Value and first two derivatives within interval i.
  std::array<double, 3> eval(std::size_t i, double t) const {
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    const double v = a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    const double d1 = (y_[i + 1] - y_[i]) / h + (-(3 * a * a - 1) * m_[i] + (3 * b * b - 1) * m_[i + 1]) * h / 6.0;
    const double d2 = a * m_[i] + b * m_[i + 1];
    return {v, d1, d2};
  }

 private:
  std::vector<double> x_, y_, m_;
};

struct PlanarTable {
  explicit PlanarTable(CurvatureProfile k) : profile(std::move(k)) {}
  CurvatureProfile profile;
  double s0 = 0.0;  // first node
  double h = 0.0;   // node spacing
  std::vector<double> theta;
  std::vector<double> x, y;
  double max_abs_k = 0.0;

  std::size_t size() const { return theta.size(); }
  double s_end() const { return s0 + h * static_cast<double>(size() - 1); }
};

struct SampledTable {
  std::vector<double> t;     // spline knots
  std::vector<double> s;     // arc length at knots, origin-shifted
  std::array<CubicSpline, 3> spline;
  double max_abs_k = 0.0;
};

}  // namespace detail

/// Immutable arc-length parametrized curve; cheap to copy (shared caches).
class Curve {
 public:
  static Curve straight_line() {
    Curve c(CurveFamily::StraightLine);
    c.domain_hint_ = 1.0;
    return c;
  }

  /// Planar curve with tangent angle theta(s) = int_0^s k and gamma(0) = 0.
  /// Dense samples of theta and gamma are cached on [-domain_hint, domain_hint];
  /// outside that range the curve continues as a straight line.
  static Curve planar(const CurvatureProfile& profile, std::optional<double> domain_hint = {},
                      double table_step = 5e-3) {
    const double hint = domain_hint.value_or(profile.default_domain_hint());
    if (!(hint > 0.0) || !(table_step > 0.0)) throw DomainError("curve", "domain_hint and table step must be positive");
    Curve c(CurveFamily::PlanarCurvatureProfile);
    c.domain_hint_ = hint;
    c.params_ = profile.params();
    c.planar_ = build_planar(profile, hint, table_step);
    c.straight_ = profile.identically_zero();
    return c;
  }

  /// Curve through samples (t, x, y, z) with strictly increasing t. Arc length
  /// is measured from t = 0 when 0 lies in the sampled range, else from t_0.
  static Curve sampled(const std::vector<std::array<double, 4>>& samples, std::optional<double> domain_hint = {}) {
    if (samples.size() < 4) throw DomainError("curve", "sampled curve needs at least 4 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (double v : samples[i]) {
        if (!std::isfinite(v)) throw DomainError("curve", "sample " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && !(samples[i][0] > samples[i - 1][0])) {
        throw DomainError("curve", "sample " + std::to_string(i) + ": parameter not strictly increasing");
      }
    }
    Curve c(CurveFamily::SampledParametric);
    c.sampled_ = build_sampled(samples);
    const auto& s = c.sampled_->s;
    c.domain_hint_ = domain_hint.value_or(std::min(-s.front(), s.back()));
    c.params_ = {{"n_samples", static_cast<double>(samples.size())}};
    c.straight_ = c.sampled_->max_abs_k < 1e-12;
    return c;
  }

  Curve transformed(const RigidMotion& m) const {
    Curve c = *this;
    c.motion_.rotation = m.rotation * motion_.rotation;
    c.motion_.translation = m.rotation * motion_.translation + m.translation;
    return c;
  }

  Curve with_frame_policy(FramePolicy policy) const {
    Curve c = *this;
    c.policy_ = policy;
    return c;
  }

  CurveFamily family() const { return family_; }
  const std::map<std::string, double>& parameters() const { return params_; }
  double domain_hint() const { return domain_hint_; }
  FramePolicy frame_policy() const { return policy_; }
  const RigidMotion& motion() const { return motion_; }

  /// True when the curve is a straight line exactly (B vanishes identically).
  bool is_straight() const { return family_ == CurveFamily::StraightLine || straight_; }

  /// Arc-length range where the curve is defined.
  ArcInterval arc_range() const {
    if (family_ == CurveFamily::SampledParametric) return {sampled_->s.front(), sampled_->s.back()};
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }

  Vec3 point(double s) const { return motion_.rotation * local_point(s) + motion_.translation; }
  Vec3 tangent(double s) const { return motion_.rotation * local_tangent(s); }
  /// Second arc-length derivative gamma''(s) = k(s) n(s).
  Vec3 curvature_vector(double s) const { return motion_.rotation * local_curvature_vector(s); }
  double curvature(double s) const { return local_curvature_vector(s).norm(); }

  FrenetFrame frame(double s) const {
    const Vec3 t = local_tangent(s);
    Vec3 n;
    const Vec3 kv = local_curvature_vector(s);
    const double k = kv.norm();
    if (family_ == CurveFamily::PlanarCurvatureProfile) {
      if (policy_ == FramePolicy::Strict && k < 1e-12) degenerate(s);
      n = Vec3(-t.y(), t.x(), 0.0);  // parallel transport in the plane
    } else if (k > kFrameCurvatureFloor) {
      n = kv / k;
    } else {
      if (policy_ == FramePolicy::Strict) degenerate(s);
      n = fallback_normal(s, t);
    }
    Vec3 b = t.cross(n);
    FrenetFrame f{motion_.rotation * t, motion_.rotation * b, motion_.rotation * n};
    return f;
  }

  double max_curvature() const {
    if (planar_) return planar_->max_abs_k;
    if (sampled_) return sampled_->max_abs_k;
    return 0.0;
  }

  /// Largest admissible shift radius r0 = min(0.5 / max|k|, 0.5).
  double shift_radius_limit() const {
    const double kmax = max_curvature();
    return kmax > 0.0 ? std::min(0.5 / kmax, 0.5) : 0.5;
  }

  /// gamma(s) + r cos(angle) b(s) + r sin(angle) n(s).
  Vec3 shifted_point(double s, double r, double angle) const {
    if (!(r > 0.0) || !(r < shift_radius_limit())) {
      throw DomainError("curve", "shift radius " + std::to_string(r) + " outside (0, r0 = " +
                                     std::to_string(shift_radius_limit()) + ")");
    }
    const FrenetFrame f = frame(s);
    return point(s) + r * std::cos(angle) * f.b + r * std::sin(angle) * f.n;
  }

 private:
  static constexpr double kFrameCurvatureFloor = 1e-9;

  explicit Curve(CurveFamily f) : family_(f) {}

  [[noreturn]] static void degenerate(double s) {
    throw DegenerateFrameError("curve", "Frenet frame undefined at curvature zero s = " + std::to_string(s));
  }

  void check_range(double s) const {
    if (!std::isfinite(s)) throw DomainError("curve", "arc length must be finite");
    if (family_ != CurveFamily::SampledParametric) return;
    const auto& sv = sampled_->s;
    const double slack = 1e-12 * std::max(1.0, sv.back() - sv.front());
    if (s < sv.front() - slack || s > sv.back() + slack) {
      throw OutOfDomainError("curve", "s = " + std::to_string(s) + " outside sampled range [" +
                                          std::to_string(sv.front()) + ", " + std::to_string(sv.back()) + "]");
    }
  }

  // --- planar ---------------------------------------------------------------

  static std::shared_ptr<const detail::PlanarTable> build_planar(const CurvatureProfile& profile, double hint,
                                                                 double step) {
    using GL = boost::math::quadrature::gauss<double, 7>;
    auto table = std::make_shared<detail::PlanarTable>(profile);
    std::size_t half = static_cast<std::size_t>(std::ceil(hint / step));
    const std::size_t n = 2 * half + 1;
    table->h = hint / static_cast<double>(half);
    table->s0 = -hint;
    table->theta.assign(n, 0.0);
    table->x.assign(n, 0.0);
    table->y.assign(n, 0.0);
    const auto& k = table->profile;
    auto s_of = [&](std::size_t i) { return (static_cast<double>(i) - static_cast<double>(half)) * table->h; };
    // theta(u) for u in a cell that starts at node i
    auto theta_in_cell = [&](std::size_t i, double u) {
      const double a = s_of(i);
      return table->theta[i] + GL::integrate(k, a, u);
    };
    auto advance = [&](std::size_t from, std::size_t to) {
      const double a = s_of(from), b = s_of(to);
      table->theta[to] = table->theta[from] + GL::integrate(k, a, b);
      table->x[to] = table->x[from] + GL::integrate([&](double u) { return std::cos(theta_in_cell(from, u)); }, a, b);
      table->y[to] = table->y[from] + GL::integrate([&](double u) { return std::sin(theta_in_cell(from, u)); }, a, b);
    };
    for (std::size_t i = half; i + 1 < n; ++i) advance(i, i + 1);
    for (std::size_t i = half; i > 0; --i) advance(i, i - 1);
    double kmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) kmax = std::max(kmax, std::abs(k(s_of(i))));
    table->max_abs_k = kmax;
    return table;
  }

  // Cell index and local coordinate for s inside the planar table.
  std::pair<std::size_t, double> planar_cell(double s) const {
    const auto& tb = *planar_;
    const double u = (s - tb.s0) / tb.h;
    std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(tb.size() - 2)));
    return {i, u - static_cast<double>(i)};
  }

  double planar_theta(double s) const {
    const auto& tb = *planar_;
    if (s <= tb.s0) return tb.theta.front();
    if (s >= tb.s_end()) return tb.theta.back();
    auto [i, tau] = planar_cell(s);
    const double s_i = tb.s0 + tb.h * static_cast<double>(i);
    return detail::hermite(tb.theta[i], tb.theta[i + 1], tb.profile(s_i), tb.profile(s_i + tb.h), tb.h, tau);
  }

  Vec3 planar_point(double s) const {
    const auto& tb = *planar_;
    if (s <= tb.s0 || s >= tb.s_end()) {
      const std::size_t e = s <= tb.s0 ? 0 : tb.size() - 1;
      const double se = s <= tb.s0 ? tb.s0 : tb.s_end();
      const double th = tb.theta[e];
      return {tb.x[e] + (s - se) * std::cos(th), tb.y[e] + (s - se) * std::sin(th), 0.0};
    }
    auto [i, tau] = planar_cell(s);
    const double s_i = tb.s0 + tb.h * static_cast<double>(i);
    const double k0 = tb.profile(s_i), k1 = tb.profile(s_i + tb.h);
    const double c0 = std::cos(tb.theta[i]), c1 = std::cos(tb.theta[i + 1]);
    const double s0 = std::sin(tb.theta[i]), s1 = std::sin(tb.theta[i + 1]);
    // gamma' = (cos theta, sin theta), gamma'' = k (-sin theta, cos theta)
    return {detail::hermite5(tb.x[i], tb.x[i + 1], c0, c1, -k0 * s0, -k1 * s1, tb.h, tau),
            detail::hermite5(tb.y[i], tb.y[i + 1], s0, s1, k0 * c0, k1 * c1, tb.h, tau), 0.0};
  }

  // --- sampled --------------------------------------------------------------

  static std::shared_ptr<const detail::SampledTable> build_sampled(const std::vector<std::array<double, 4>>& samples) {
    auto tb = std::make_shared<detail::SampledTable>();
    const std::size_t n = samples.size();
    tb->t.resize(n);
    std::array<std::vector<double>, 3> coord;
    for (auto& c : coord) c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      tb->t[i] = samples[i][0];
      for (int d = 0; d < 3; ++d) coord[d][i] = samples[i][d + 1];
    }
    for (int d = 0; d < 3; ++d) tb->spline[d] = detail::CubicSpline(tb->t, coord[d]);
    tb->s.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto speed = [&](double t) { return derivative(*tb, i, t, 1).norm(); };
      const double len = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(speed, tb->t[i], tb->t[i + 1], 10, 1e-14);
      if (!(len > 0.0)) throw SingularGeometryError("curve", "zero-length segment after sample " + std::to_string(i));
      tb->s[i + 1] = tb->s[i] + len;
    }
    // Arc-length origin at t = 0 when sampled, else at the first knot.
    double origin = 0.0;
    if (tb->t.front() <= 0.0 && 0.0 <= tb->t.back()) origin = arc_length_at(*tb, 0.0);
    for (auto& v : tb->s) v -= origin;
    double kmax = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (double f : {0.0, 0.25, 0.5, 0.75}) {
        const double t = tb->t[i] + f * (tb->t[i + 1] - tb->t[i]);
        kmax = std::max(kmax, sampled_curvature_vector(*tb, i, t).norm());
      }
    }
    kmax = std::max(kmax, sampled_curvature_vector(*tb, n - 2, tb->t.back()).norm());
    tb->max_abs_k = kmax;
    return tb;
  }

  static std::size_t knot_interval(const detail::SampledTable& tb, double t) {
    auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
    const std::size_t j = static_cast<std::size_t>(std::distance(tb.t.begin(), it));
    return std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, tb.t.size() - 2);
  }

  static Vec3 derivative(const detail::SampledTable& tb, std::size_t i, double t, int order) {
    Vec3 v;
    for (int d = 0; d < 3; ++d) v[d] = tb.spline[d].eval(i, t)[static_cast<std::size_t>(order)];
    return v;
  }

  static double arc_length_at(const detail::SampledTable& tb, double t) {
    const std::size_t i = knot_interval(tb, t);
    auto speed = [&](double u) { return derivative(tb, i, u, 1).norm(); };
    return tb.s[i] + boost::math::quadrature::gauss<double, 10>::integrate(speed, tb.t[i], t);
  }

  static Vec3 sampled_curvature_vector(const detail::SampledTable& tb, std::size_t i, double t) {
    const Vec3 d1 = derivative(tb, i, t, 1), d2 = derivative(tb, i, t, 2);
    const double sp = d1.norm();
    const Vec3 tt = d1 / sp;
    return (d2 - d2.dot(tt) * tt) / (sp * sp);
  }

  // Spline parameter and interval for arc length s (Newton with bisection guard).
  std::pair<std::size_t, double> sampled_parameter(double s) const {
    const auto& tb = *sampled_;
    auto it = std::upper_bound(tb.s.begin(), tb.s.end(), s);
    std::size_t i = static_cast<std::size_t>(std::distance(tb.s.begin(), it));
    i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, tb.s.size() - 2);
    double lo = tb.t[i], hi = tb.t[i + 1];
    const double target = std::clamp(s, tb.s[i], tb.s[i + 1]) - tb.s[i];
    double t = lo + (hi - lo) * target / (tb.s[i + 1] - tb.s[i]);
    auto speed = [&](double u) { return derivative(tb, i, u, 1).norm(); };
    for (int iter = 0; iter < 60; ++iter) {
      const double f = boost::math::quadrature::gauss<double, 10>::integrate(speed, tb.t[i], t) - target;
      if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(tb.s[i + 1]))) break;
      if (f > 0) hi = t; else lo = t;
      double next = t - f / speed(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      t = next;
    }
    return {i, t};
  }

  Vec3 fallback_normal(double s, const Vec3& t) const {
    if (family_ == CurveFamily::SampledParametric) {
      const auto& tb = *sampled_;
      std::vector<std::size_t> order(tb.t.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return std::abs(tb.s[a] - s) < std::abs(tb.s[b] - s); });
      for (std::size_t j : order) {
        const std::size_t i = std::min(j, tb.t.size() - 2);
        const Vec3 kv = sampled_curvature_vector(tb, i, tb.t[j]);
        if (kv.norm() > kFrameCurvatureFloor) {
          Vec3 n = kv / kv.norm();
          n -= n.dot(t) * t;
          if (n.norm() > 1e-6) return n.normalized();
        }
      }
    }
    // Globally straight: n = normalized projection of e_y (e_z if t ~ e_y).
    Vec3 ref = Vec3::UnitY();
    if (std::abs(t.dot(ref)) > 0.9) ref = Vec3::UnitZ();
    Vec3 n = ref - ref.dot(t) * t;
    return n.normalized();
  }

  // --- untransformed evaluation ---------------------------------------------

  Vec3 local_point(double s) const {
    check_range(s);
    switch (family_) {
      case CurveFamily::StraightLine: return {s, 0.0, 0.0};
      case CurveFamily::PlanarCurvatureProfile: return planar_point(s);
      case CurveFamily::SampledParametric: {
        auto [i, t] = sampled_parameter(s);
        return derivative(*sampled_, i, t, 0);
      }
    }
    return Vec3::Zero();
  }

  Vec3 local_tangent(double s) const {
    check_range(s);
    switch (family_) {
      case CurveFamily::StraightLine: return Vec3::UnitX();
      case CurveFamily::PlanarCurvatureProfile: {
        const double th = planar_theta(s);
        return {std::cos(th), std::sin(th), 0.0};
      }
      case CurveFamily::SampledParametric: {
        auto [i, t] = sampled_parameter(s);
        return derivative(*sampled_, i, t, 1).normalized();
      }
    }
    return Vec3::UnitX();
  }

  Vec3 local_curvature_vector(double s) const {
    check_range(s);
    switch (family_) {
      case CurveFamily::StraightLine: return Vec3::Zero();
      case CurveFamily::PlanarCurvatureProfile: {
        const auto& tb = *planar_;
        if (s < tb.s0 || s > tb.s_end()) return Vec3::Zero();
        const double th = planar_theta(s);
        return tb.profile(s) * Vec3(-std::sin(th), std::cos(th), 0.0);
      }
      case CurveFamily::SampledParametric: {
        auto [i, t] = sampled_parameter(s);
        return sampled_curvature_vector(*sampled_, i, t);
      }
    }
    return Vec3::Zero();
  }

  CurveFamily family_;
  std::map<std::string, double> params_;
  double domain_hint_ = 1.0;
  bool straight_ = false;
  FramePolicy policy_ = FramePolicy::ParallelTransportFallback;
  RigidMotion motion_;
  std::shared_ptr<const detail::PlanarTable> planar_;
  std::shared_ptr<const detail::SampledTable> sampled_;
};

// Free-function forms of the curve operations.

inline Vec3 eval_point(const Curve& c, double s) { return c.point(s); }
inline FrenetFrame eval_frame(const Curve& c, double s) { return c.frame(s); }
inline double curvature_at(const Curve& c, double s) { return c.curvature(s); }
inline Vec3 shifted_point(const Curve& c, double s, double r, double angle) { return c.shifted_point(s, r, angle); }

}  // namespace leakywire
