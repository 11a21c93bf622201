#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "leakywire/eigenfield.hpp"
#include "leakywire/solver.hpp"

using namespace leakywire;

namespace {

constexpr double kPi = std::numbers::pi;

Curve bump() { return Curve::planar(CurvatureProfile::gaussian(1.0, 1.0)); }

Eigen::VectorXd gaussian_h(const GridSpec& g, double width) {
  Eigen::VectorXd h(static_cast<Eigen::Index>(g.N()));
  for (std::size_t i = 0; i < g.N(); ++i) h(static_cast<Eigen::Index>(i)) = std::exp(-std::pow(g.node(i) / width, 2));
  return h;
}

}  // namespace

TEST(BesselK0, ReferenceValues) {
  EXPECT_NEAR(bessel_k0(1.0), 0.42102443824070834, 1e-15);
  for (double x : {0.01, 0.3, 2.0, 7.5}) {
    EXPECT_NEAR(bessel_k0(x), boost::math::cyl_bessel_k(0, x), 1e-14 * boost::math::cyl_bessel_k(0, x));
  }
}

TEST(Field, ZeroDensityGivesZeroField) {
  const GridSpec g(8, 64);
  const FieldReconstructor f(bump(), g, 1.0, Eigen::VectorXd::Zero(64));
  EXPECT_EQ(f.nodal(Vec3(0.1, 1.0, 0.3)), 0.0);
  EXPECT_EQ(f.resolved(bump().shifted_point(0.0, 0.01, 0.0), 0.0, 0.01), 0.0);
}

TEST(Field, StraightLineSourceIsBesselK0) {
  const GridSpec g(30, 1200);
  const FieldReconstructor f(Curve::straight_line(), g, 1.0, Eigen::VectorXd::Ones(1200));
  EXPECT_NEAR(f.nodal(Vec3(0, 1, 0)), bessel_k0(1.0) / (2 * kPi), 1e-9);
  EXPECT_NEAR(f.nodal(Vec3(0.3, 0, 2)), bessel_k0(2.0) / (2 * kPi), 1e-9);
}

TEST(Field, DecaysLikeBesselAwayFromLine) {
  const GridSpec g(30, 1200);
  const FieldReconstructor f(Curve::straight_line(), g, 0.8, Eigen::VectorXd::Ones(1200));
  const double ratio = f.nodal(Vec3(0, 4, 0)) / f.nodal(Vec3(0, 2, 0));
  EXPECT_NEAR(ratio, bessel_k0(3.2) / bessel_k0(1.6), 1e-8);
  EXPECT_LT(ratio, std::exp(-0.8 * 2.0));
}

TEST(Field, NodalRefusesPointsOnTheCurve) {
  const GridSpec g(8, 64);
  const FieldReconstructor f(bump(), g, 1.0, Eigen::VectorXd::Ones(64));
  EXPECT_THROW(f.nodal(bump().point(g.node(10))), NearSingularityError);
  EXPECT_THROW(FieldReconstructor(bump(), g, 1.0, Eigen::VectorXd::Ones(63)), DomainError);
}

TEST(Field, Linearity) {
  const GridSpec g(10, 160);
  const Curve c = bump();
  const Eigen::VectorXd h1 = gaussian_h(g, 1.0), h2 = gaussian_h(g, 2.5);
  const Vec3 x(0.4, 0.5, -0.2);
  const double a = FieldReconstructor(c, g, 1.1, h1).nodal(x), b = FieldReconstructor(c, g, 1.1, h2).nodal(x);
  EXPECT_NEAR(FieldReconstructor(c, g, 1.1, h1 + 2.0 * h2).nodal(x), a + 2.0 * b, 1e-14);
  const auto samples = reconstruct_field(c, g, 1.1, h1, {x, Vec3(0, 3, 0)});
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].value, a);
}

TEST(Trace, StraightLineTraceIsBesselProfile) {
  const GridSpec g(20, 400);
  const Curve line = Curve::straight_line();
  const FieldReconstructor f(line, g, 1.0, Eigen::VectorXd::Ones(400));
  const auto radii = radii_ladder(1e-3, 1e-2, 6);
  auto t = trace_on_shifted(f, line, 0.0, radii, 4);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    EXPECT_NEAR(t.values[k], bessel_k0(radii[k]) / (2 * kPi), 1e-9);
    if (k > 0) EXPECT_GT(t.values[k], t.values[k - 1]);
  }
  fit_trace(t);
  EXPECT_NEAR(t.xi, 1.0 / (2 * kPi), 1e-4);
  EXPECT_NEAR(t.omega, s_kappa(1.0), 1e-4);
}

TEST(Trace, RadiiLadder) {
  const auto r = radii_ladder(1e-3, 1e-1, 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r[0], 1e-1);
  EXPECT_NEAR(r[1], 1e-2, 1e-17);
  EXPECT_NEAR(r[2], 1e-3, 1e-18);
  EXPECT_THROW(radii_ladder(1e-2, 1e-3, 4), DomainError);
}

TEST(ExtractXiOmega, SyntheticLogProfile) {
  const auto radii = radii_ladder(1e-3, 1e-1, 10);
  std::vector<double> v;
  for (double r : radii) v.push_back(2.0 * std::log(r) + 5.0);
  const auto xo = extract_xi_omega(v, radii);
  EXPECT_NEAR(xo.xi, -2.0, 1e-12);
  EXPECT_NEAR(xo.omega, 5.0, 1e-11);
  EXPECT_LT(xo.fit_residual, 1e-13);
}

TEST(ExtractXiOmega, RejectsPoorData) {
  const auto radii = radii_ladder(1e-3, 1e-1, 3);
  EXPECT_THROW(extract_xi_omega({1, 2, 3}, radii), FitError);
  EXPECT_THROW(extract_xi_omega({1, 2, 3, 4}, {1e-3, 1.2e-3, 1.5e-3, 2e-3}), FitError);
  EXPECT_THROW(extract_xi_omega({1, 2}, {1e-3, 1e-2, 1e-1}), FitError);
}

TEST(Trace, RegularPartMatchesQh) {
  // For a general density the regular part of the trace is (T + B) h.
  const GridSpec g(16, 512);
  const Curve c = bump();
  const double kappa = 1.2;
  const Eigen::VectorXd h = gaussian_h(g, 2.0);
  const Eigen::VectorXd Qh = assemble_Q(c, g, kappa).matrix * h;
  const FieldReconstructor f(c, g, kappa, h);
  for (std::size_t i : {200u, 256u, 300u}) {
    const double s = g.node(i);
    auto t = trace_on_shifted(f, c, s, radii_ladder(1e-3, 1e-2, 8), 8);
    fit_trace(t);
    EXPECT_NEAR(t.xi, h(static_cast<Eigen::Index>(i)) / (2 * kPi), 0.02 * h(static_cast<Eigen::Index>(i)) / (2 * kPi));
    EXPECT_NEAR(t.omega, Qh(static_cast<Eigen::Index>(i)), 0.02 * std::abs(Qh(static_cast<Eigen::Index>(i))));
  }
}

TEST(BoundaryCondition, BumpGroundStateSatisfiesIt) {
  SolveConfig cfg;
  cfg.alpha = 0.0;
  cfg.grid = GridSpec(16, 512);
  cfg.m_branches = 2;
  const Curve c = bump();
  const auto states = find_bound_states(c, cfg);
  ASSERT_FALSE(states.empty());
  const auto rep = bc_report(c, cfg.grid, states.front().kappa_tilde, states.front().h, 0.0, {-0.5, 0.0, 0.5});
  ASSERT_EQ(rep.points.size(), 3u);
  EXPECT_LE(rep.max_residual, 0.05);
  EXPECT_LE(rep.max_xi_rel_error, 0.02);
  EXPECT_LE(rep.max_direction_spread, 0.05);
  for (const auto& p : rep.points) EXPECT_GT(p.h, 0.0);
}

TEST(BoundaryCondition, NonEigenvectorViolatesIt) {
  const GridSpec g(16, 256);
  const double res = bc_residual(bump(), g, 1.0, gaussian_h(g, 0.3), 0.0, {0.0});
  EXPECT_GT(res, 0.05);
}

TEST(Macdonald, IdentityTriples) {
  for (auto [r, u, kappa] : {std::tuple{1.0, 0.0, 1.0}, {0.5, 1.0, 2.0}, {0.1, 0.3, 0.7}}) {
    const double lhs = green3(std::hypot(r, u), kappa);
    EXPECT_NEAR(macdonald_integral(r, u, kappa), lhs, 1e-6 * lhs) << r << " " << u << " " << kappa;
  }
  EXPECT_NEAR(green3(1.0, 1.0), 0.0292749, 1e-7);
  EXPECT_THROW(macdonald_integral(0.0, 1.0, 1.0), DomainError);
}
