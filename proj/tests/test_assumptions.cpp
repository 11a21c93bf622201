#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "leakywire/assumptions.hpp"

using namespace leakywire;

namespace {

Curve bump() { return Curve::planar(CurvatureProfile::gaussian(1.0, 1.0)); }

Curve sampled_unit_circle(double t_max, int n) {
  std::vector<std::array<double, 4>> samples;
  for (int i = 0; i < n; ++i) {
    const double t = -t_max + 2.0 * t_max * i / (n - 1);
    samples.push_back({t, std::sin(t), 1.0 - std::cos(t), 0.0});
  }
  return Curve::sampled(samples);
}

}  // namespace

TEST(Xi, Values) {
  EXPECT_DOUBLE_EQ(xi_of(1.0 / 3.0), 2.0);
  for (double w : {0.01, 0.2, 0.5, 0.9}) EXPECT_GT(xi_of(w), 1.0);
  EXPECT_THROW(xi_of(1.0), DomainError);
  EXPECT_THROW(xi_of(0.0), DomainError);
}

TEST(SMembership, Branches) {
  // omega = 1/3 gives threshold 2 epsilon.
  const double w = 1.0 / 3.0, eps = 1.0;
  EXPECT_TRUE(in_S(2.0, 3.0, w, eps));    // |s+s'| = 5 > 2, ratio 2/3
  EXPECT_FALSE(in_S(1.0, 4.0, w, eps));   // ratio 1/4 < 1/3
  EXPECT_FALSE(in_S(-3.0, 4.0, w, eps));  // opposite signs
  EXPECT_TRUE(in_S(0.2, 0.9, w, eps));    // |s+s'| < 2, |s-s'| < 1
  EXPECT_FALSE(in_S(-0.6, 0.5, w, eps));  // |s-s'| = 1.1 >= 1
  EXPECT_FALSE(in_S(0.5, 1.5, w, eps));   // |s+s'| = 2 exactly: neither branch
}

TEST(SMembership, Symmetric) {
  for (double w : {0.2, 0.5, 0.8}) {
    for (double eps : {0.5, 1.0, 3.0}) {
      for (double s = -6.0; s <= 6.0; s += 0.35) {
        for (double t = -6.0; t <= 6.0; t += 0.35) EXPECT_EQ(in_S(s, t, w, eps), in_S(t, s, w, eps));
      }
    }
  }
}

TEST(CheckA1, StraightIsExactlyOne) {
  const auto rep = check_a1(Curve::straight_line(), {-10, 10}, 200);
  EXPECT_EQ(rep.c_estimate, 1.0);
  EXPECT_TRUE(rep.pass_a1);
}

TEST(CheckA1, BumpMatchesExhaustiveScan) {
  const Curve c = bump();
  const auto rep = check_a1(c, {-10, 10}, 400);
  double brute = 1.0;
  for (int i = 0; i < 400; ++i) {
    for (int j = i + 1; j < 400; ++j) {
      const double s = -10.0 + 20.0 * i / 399.0, t = -10.0 + 20.0 * j / 399.0;
      brute = std::min(brute, (c.point(s) - c.point(t)).norm() / (t - s));
    }
  }
  EXPECT_GT(rep.c_estimate, 0.0);
  EXPECT_LT(rep.c_estimate, 1.0);
  EXPECT_NEAR(rep.c_estimate, brute, 1e-14);
  EXPECT_TRUE(rep.pass_a1);
}

TEST(CheckA1, CircleHalfTurnChord) {
  // On a half circle the worst pair is the two endpoints: chord 2, arc pi.
  const Curve c = sampled_unit_circle(std::numbers::pi / 2 + 0.2, 241);
  const auto rep = check_a1(c, {-std::numbers::pi / 2, std::numbers::pi / 2}, 181);
  EXPECT_NEAR(rep.c_estimate, 2.0 / std::numbers::pi, 1e-6);
}

TEST(CheckA1, IsometryInvariant) {
  RigidMotion m;
  m.rotation = Eigen::AngleAxisd(1.1, Vec3(0.3, -1.0, 2.0).normalized()).toRotationMatrix();
  m.translation = Vec3(5, 6, 7);
  const double a = check_a1(bump(), {-10, 10}, 300).c_estimate;
  const double b = check_a1(bump().transformed(m), {-10, 10}, 300).c_estimate;
  EXPECT_NEAR(a, b, 1e-10);
}

TEST(CheckA1, RhoOverSigmaInUnitInterval) {
  const Curve c = bump();
  for (double s = -8.0; s < 8.0; s += 0.5) {
    for (double t = s + 0.25; t < 8.0; t += 0.5) {
      const double q = (c.point(s) - c.point(t)).norm() / (t - s);
      EXPECT_GT(q, 0.0);
      EXPECT_LE(q, 1.0 + 1e-14);
    }
  }
}

TEST(CheckA2, StraightLineNeedsNoD) {
  for (double mu : {0.0, 0.7, 2.0}) {
    const auto rep = check_a2(Curve::straight_line(), 0.5, 1.0, mu, {-10, 10}, 201);
    ASSERT_TRUE(rep.a2_certificate);
    EXPECT_EQ(rep.a2_certificate->d, 0.0);
    EXPECT_TRUE(rep.pass_a2);
  }
}

TEST(CheckA2, BumpCertifiedWithMuOne) {
  const auto rep = check_a2(bump(), 0.5, 1.0, 1.0, {-10, 10}, 401);
  ASSERT_TRUE(rep.a2_certificate);
  EXPECT_TRUE(std::isfinite(rep.a2_certificate->d));
  EXPECT_GT(rep.a2_certificate->d, 0.0);
  EXPECT_LE(rep.a2_certificate->max_violation, 0.0);
  EXPECT_GT(rep.a2_certificate->n_pairs, 1000u);
  EXPECT_TRUE(rep.pass_a2);
}

TEST(CheckA2, RequiredDFormula) {
  // 1 - rho/sigma = 0.1 at sigma = 2, s^2 + s'^2 = 10, mu = 1
  EXPECT_NEAR(a2_required_d(1.0, 3.0, 1.8, 1.0), 0.1 * 3.0 * std::sqrt(11.0) / 2.0, 1e-14);
  EXPECT_EQ(a2_required_d(1.0, 3.0, 2.0, 1.0), 0.0);
}

TEST(CurvatureDecay, StraightIsInfinitePass) {
  const auto fit = check_curvature_decay(Curve::straight_line(), {-100, 100}, 401);
  EXPECT_TRUE(std::isinf(fit.beta));
  EXPECT_TRUE(fit.pass);
}

TEST(CurvatureDecay, SyntheticPowerLaws) {
  std::vector<double> s, k2, k1;
  for (int i = 0; i <= 400; ++i) {
    const double v = -50.0 + 100.0 * i / 400.0;
    if (std::abs(v) < 1.0) continue;
    s.push_back(v);
    k2.push_back(std::pow(std::abs(v), -2.0));
    k1.push_back(1.0 / std::abs(v));
  }
  const auto f2 = check_curvature_decay(s, k2);
  EXPECT_NEAR(f2.beta, 2.0, 0.05);
  EXPECT_TRUE(f2.pass);
  const auto f1 = check_curvature_decay(s, k1);
  EXPECT_NEAR(f1.beta, 1.0, 0.05);
  EXPECT_FALSE(f1.pass);
}

TEST(CurvatureDecay, GaussianIsSuperPolynomial) {
  const auto fit = check_curvature_decay(bump(), {-7.5, 7.5}, 301);
  EXPECT_TRUE(fit.super_polynomial);
  EXPECT_TRUE(std::isinf(fit.beta));
  EXPECT_TRUE(fit.pass);
}

TEST(CurvatureDecay, PowerTailCurve) {
  const Curve c = Curve::planar(CurvatureProfile::power_tail(0.5, 2.0));
  const auto fit = check_curvature_decay(c, {-300, 300}, 601);
  EXPECT_NEAR(fit.beta, 2.0, 0.05);
  EXPECT_FALSE(fit.super_polynomial);
  EXPECT_TRUE(fit.pass);
}
