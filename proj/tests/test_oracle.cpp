#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "leakywire/oracle.hpp"

using namespace leakywire;

namespace {

Curve bump() { return Curve::planar(CurvatureProfile::gaussian(1.0, 1.0)); }

}  // namespace

class StraightOracle : public ::testing::TestWithParam<double> {};

TEST_P(StraightOracle, SmallGrid) {
  const auto rep = straight_line_oracle(GetParam(), GridSpec(16, 512));
  EXPECT_TRUE(rep.passed) << rep.details;
  EXPECT_LE(rep.measured, 1e-12);
}

TEST_P(StraightOracle, LargeGrid) {
  const auto rep = straight_line_oracle(GetParam(), GridSpec(24, 1024));
  EXPECT_TRUE(rep.passed) << rep.details;
}

INSTANTIATE_TEST_SUITE_P(Alphas, StraightOracle, ::testing::Values(-1.0, -0.5, 0.0, 0.3, 1.0));

TEST(Threshold, ClosedForms) {
  const double psi1 = -0.57721566490153286;
  EXPECT_NEAR(kappa0(0.3), 2.0 * std::exp(psi1 - 0.6 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(zeta0(-0.5), -4.0 * std::exp(2.0 * (std::numbers::pi + psi1)), 1e-12);
  EXPECT_NEAR(zeta0(0.0), -1.26095, 5e-6);
}

TEST(ScalingInequality, BumpPasses) {
  std::vector<ScalingTerms> terms;
  const auto rep = scaling_inequality_check(bump(), 1.2, {0.2, 0.1, 0.05}, &terms);
  EXPECT_TRUE(rep.passed) << rep.details;
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_DOUBLE_EQ(terms.back().lambda, 0.05);
  EXPECT_GT(terms.back().sum(), 0.0);
  for (const auto& t : terms) {
    EXPECT_LT(t.log_term, 0.0);
    EXPECT_GT(t.kernel_term, 0.0);
  }
}

TEST(ScalingInequality, LogTermSmallLambdaAsymptotics) {
  // ln(1 + x^2) ~ x^2 gives -(lambda/kappa)^2 sqrt(pi) / (8 pi).
  const double lam = 1e-3, kappa = 1.5;
  const double expect = -std::pow(lam / kappa, 2) * std::sqrt(std::numbers::pi) / (8.0 * std::numbers::pi);
  EXPECT_NEAR(scaling_log_term(lam, kappa), expect, 1e-5 * std::abs(expect));
}

TEST(ScalingInequality, StraightLineFails) {
  const auto rep = scaling_inequality_check(Curve::straight_line(), 1.2, {0.2, 0.1});
  EXPECT_FALSE(rep.passed);
  EXPECT_LT(rep.measured, 0.0);
}

TEST(KernelScan, BumpPasses) {
  const auto rep = kernel_property_scan(bump(), {1.2, 1.8, 2.4}, GridSpec(8, 128));
  EXPECT_TRUE(rep.passed) << rep.details;
  EXPECT_GE(rep.measured, 0.0);
}

TEST(KernelScan, DirectMatrixMatchesAssembly) {
  const GridSpec g(8, 128);
  const auto direct = kernel_matrix_direct(bump(), g, 1.3);
  EXPECT_LT((direct - assemble_B(bump(), g, 1.3).matrix).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(KernelScan, CorruptedEntryIsNamed) {
  const GridSpec g(8, 64);
  std::vector<Eigen::MatrixXd> mats{kernel_matrix_direct(bump(), g, 1.0), kernel_matrix_direct(bump(), g, 2.0)};
  mats[1](5, 9) = -1e-10;
  const auto rep = kernel_property_scan(mats, {1.0, 2.0});
  EXPECT_FALSE(rep.passed);
  EXPECT_NE(rep.details.find("(5, 9)"), std::string::npos) << rep.details;
}

TEST(KernelScan, IncreasingEntryIsNamed) {
  const GridSpec g(8, 64);
  std::vector<Eigen::MatrixXd> mats{kernel_matrix_direct(bump(), g, 1.0), kernel_matrix_direct(bump(), g, 2.0)};
  mats[1](2, 3) = mats[0](2, 3) + 1e-9;
  const auto rep = kernel_property_scan(mats, {1.0, 2.0});
  EXPECT_FALSE(rep.passed);
  EXPECT_NE(rep.details.find("entry (2, 3) increases"), std::string::npos) << rep.details;
}

TEST(KappaIndependence, ResolvedGaussians) {
  const GridSpec g(16, 512);
  const auto rep = kappa_independence_check(g, {1.0, 2.0}, {gaussian_test_vector(g, 0.0, 1.0), gaussian_test_vector(g, 0.5, 0.7)});
  EXPECT_TRUE(rep.passed) << rep.details;
  EXPECT_FALSE(rep.warning);
  EXPECT_LE(rep.measured, 1e-6);
}

TEST(KappaIndependence, NearlyEqualKappas) {
  const GridSpec g(16, 512);
  const auto rep = kappa_independence_check(g, {1.0, 1.0 + 1e-3}, {gaussian_test_vector(g, 0.0, 1.0)});
  EXPECT_TRUE(rep.passed) << rep.details;
}

TEST(KappaIndependence, NarrowVectorOnlyWarns) {
  const GridSpec g(16, 512);
  const auto narrow = gaussian_test_vector(g, 0.0, 0.5 * g.delta());
  EXPECT_GT(high_band_fraction(narrow), 1e-12);
  const auto rep = kappa_independence_check(g, {1.0, 2.0}, {narrow});
  EXPECT_TRUE(rep.passed) << rep.details;
  EXPECT_EQ(rep.measured, 0.0);
}

TEST(KappaIndependence, Deterministic) {
  const GridSpec g(16, 256);
  const auto f = gaussian_test_vector(g, 0.0, 1.0);
  EXPECT_EQ(renormalized_difference(g, 1.3, f), renormalized_difference(g, 1.3, f));
}

TEST(HighBand, SmoothVersusAlternating) {
  Eigen::VectorXd alt(64);
  for (int i = 0; i < 64; ++i) alt(i) = i % 2 ? -1.0 : 1.0;
  EXPECT_NEAR(high_band_fraction(alt), 1.0, 1e-12);
  EXPECT_NEAR(high_band_fraction(Eigen::VectorXd::Ones(64)), 0.0, 1e-20);
}

TEST(MultiplierContinuity, Pairs) {
  for (auto [k1, k2] : {std::pair{1.0, 2.0}, std::pair{1.2, 1.5}, std::pair{0.5, 3.0}}) {
    const auto rep = multiplier_continuity_check(GridSpec(24, 1024), k1, k2);
    EXPECT_TRUE(rep.passed) << rep.details;
    EXPECT_NEAR(rep.measured, rep.expected, 1e-14);  // attained at p = 0
  }
}

TEST(LambdaTail, BumpBelowAlphaAtLargeKappa) {
  const auto rep = lambda_tail_check(QFactory(bump(), GridSpec(16, 256)), 0.0);
  EXPECT_TRUE(rep.passed) << rep.measured;
}

TEST(Macdonald, Triples) {
  for (auto [r, u, k] : {std::tuple{1.0, 0.0, 1.0}, std::tuple{0.5, 1.0, 2.0}, std::tuple{2.0, 0.3, 0.7}}) {
    const auto rep = macdonald_check(r, u, k);
    EXPECT_TRUE(rep.passed) << rep.details;
  }
  EXPECT_NEAR(macdonald_check(1.0, 0.0, 1.0).expected, std::exp(-1.0) / (4.0 * std::numbers::pi), 1e-17);
}
