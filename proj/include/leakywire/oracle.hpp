#pragma once

// Independent analytic and brute-force checks of the operators, the spectrum
// and the solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "leakywire/curve.hpp"
#include "leakywire/eigenfield.hpp"
#include "leakywire/operators.hpp"
#include "leakywire/solver.hpp"
#include "leakywire/spectral.hpp"

namespace leakywire {

struct OracleReport {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string details;
  bool warning = false;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace detail

/// Straight line: lambda_1 = s_kappa on a kappa scan and no bound state.
inline OracleReport straight_line_oracle(double alpha, const GridSpec& grid, std::size_t n_kappa = 20) {
  OracleReport rep{"straight_line", false, 0.0, 0.0, 1e-12, "", false};
  const QFactory factory(Curve::straight_line(), grid);
  SolveConfig cfg;
  cfg.alpha = alpha;
  cfg.grid = grid;
  cfg.m_branches = 2;
  const double k0 = kappa0(alpha);
  const auto scan = spectrum_scan(factory, cfg, 0.5 * k0, 4.0 * k0, n_kappa);
  double worst = 0.0;
  for (std::size_t k = 0; k < scan.curve.kappas.size(); ++k) {
    worst = std::max(worst, std::abs(scan.curve.lambdas[k].front() - scan.curve.s_k_values[k]));
  }
  const double at_k0 = top_eigenpairs(factory.Q(k0), 1).values.front();
  worst = std::max(worst, std::abs(at_k0 - alpha));
  const auto states = find_bound_states(factory, cfg);
  rep.measured = worst;
  rep.passed = worst <= rep.tolerance && states.empty();
  rep.details = "alpha=" + detail::fmt(alpha) + " kappa0=" + detail::fmt(k0) + " zeta0=" + detail::fmt(zeta0(alpha)) +
                " max|lambda1-s_kappa|=" + detail::fmt(worst) + " states=" + std::to_string(states.size()) +
                " crossings=" + std::to_string(scan.crossings.size());
  return rep;
}

struct ScalingTerms {
  double lambda;
  double log_term;
  double kernel_term;
  double sum() const { return log_term + kernel_term; }
};

/// -(1/4pi) int ln(1 + (lambda u/kappa)^2) e^{-u^2} du for phi = e^{-s^2/2}.
inline double scaling_log_term(double lambda, double kappa) {
  auto g = [&](double u) {
    const double x = lambda * u / kappa;
    return std::log1p(x * x) * std::exp(-u * u);
  };
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 12.0, 15, 1e-14);
  return -2.0 * half / (4.0 * std::numbers::pi);
}

/// lambda int int B(s, s') phi(lambda s) phi(lambda s') ds ds' by a midpoint
/// rule with the kernel written directly as a difference of Green's functions.
inline std::vector<double> scaling_kernel_terms(const Curve& curve, double kappa, const std::vector<double>& lambdas,
                                                double half_width = 40.0, double h = 0.02) {
  const std::size_t n = static_cast<std::size_t>(std::round(2.0 * half_width / h));
  std::vector<double> s(n);
  std::vector<Vec3> p(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = -half_width + (static_cast<double>(i) + 0.5) * h;
  parallel_for(n, [&](std::size_t i) { p[i] = curve.point(s[i]); });
  const std::size_t nl = lambdas.size();
  std::vector<std::vector<double>> phi(nl, std::vector<double>(n));
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t i = 0; i < n; ++i) phi[l][i] = std::exp(-0.5 * lambdas[l] * lambdas[l] * s[i] * s[i]);
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(nl, 0.0));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rho = (p[i] - p[j]).norm(), sigma = s[j] - s[i];
      const double b = std::exp(-kappa * rho) / (4.0 * std::numbers::pi * rho) -
                       std::exp(-kappa * sigma) / (4.0 * std::numbers::pi * sigma);
      for (std::size_t l = 0; l < nl; ++l) rows[i][l] += b * phi[l][j];
    }
  });
  std::vector<double> out(nl, 0.0);
  for (std::size_t l = 0; l < nl; ++l) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += phi[l][i] * rows[i][l];
    out[l] = lambdas[l] * 2.0 * acc * h * h;
  }
  return out;
}

/// Sign of the trial-function form for small stretching lambda. Passes when
/// the form is positive at the smallest lambda, the log term halves quadratically
/// (ratio in [3.5, 4.5]) and the kernel term linearly (ratio in [1.75, 2.25] at
/// the smallest pair).
inline OracleReport scaling_inequality_check(const Curve& curve, double kappa, std::vector<double> lambdas,
                                             std::vector<ScalingTerms>* terms_out = nullptr) {
  OracleReport rep{"scaling_inequality", false, 0.0, 0.0, 0.0, "", false};
  if (lambdas.size() < 2) throw DomainError("oracle", "need at least two scale factors");
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  const auto kernel = scaling_kernel_terms(curve, kappa, lambdas);
  std::vector<ScalingTerms> terms;
  for (std::size_t l = 0; l < lambdas.size(); ++l) terms.push_back({lambdas[l], scaling_log_term(lambdas[l], kappa), kernel[l]});
  bool ok = terms.back().sum() > 0.0;
  std::string d;
  for (std::size_t l = 0; l + 1 < terms.size(); ++l) {
    const double r1 = terms[l].log_term / terms[l + 1].log_term;
    const bool halving = std::abs(terms[l].lambda - 2.0 * terms[l + 1].lambda) <= 1e-12 * terms[l].lambda;
    if (halving) {
      if (!(r1 >= 3.5 && r1 <= 4.5)) ok = false;
      d += " log_ratio(" + detail::fmt(terms[l].lambda) + ")=" + detail::fmt(r1);
    }
    if (halving && l + 2 == terms.size()) {
      const double r2 = terms[l].kernel_term / terms[l + 1].kernel_term;
      if (!(r2 >= 1.75 && r2 <= 2.25)) ok = false;
      d += " kernel_ratio(" + detail::fmt(terms[l].lambda) + ")=" + detail::fmt(r2);
    }
  }
  for (const auto& t : terms) {
    d += " [lambda=" + detail::fmt(t.lambda) + " log=" + detail::fmt(t.log_term) + " kernel=" + detail::fmt(t.kernel_term) + "]";
  }
  rep.passed = ok;
  rep.measured = terms.back().sum();
  rep.details = "one-sided: form > 0 at smallest lambda;" + d;
  if (terms_out) *terms_out = terms;
  return rep;
}

/// Kernel matrices Delta * b_kernel(s_i, s_j) evaluated pair by pair.
inline Eigen::MatrixXd kernel_matrix_direct(const Curve& curve, const GridSpec& grid, double kappa) {
  const std::size_t N = grid.N();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  parallel_for(N, [&](std::size_t i) {
    for (std::size_t j = 0; j < N; ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          grid.delta() * b_kernel(curve, grid.node(i), grid.node(j), kappa);
    }
  });
  return M;
}

/// Positivity, entrywise kappa-monotonicity and norm monotonicity of supplied
/// kernel matrices (ascending kappas), and ||B||_2 <= ||B||_SH.
inline OracleReport kernel_property_scan(const std::vector<Eigen::MatrixXd>& mats, const std::vector<double>& kappas,
                                         double negative_tol = 1e-14, double monotone_tol = 1e-15) {
  OracleReport rep{"kernel_properties", true, 0.0, 0.0, negative_tol, "", false};
  if (mats.size() != kappas.size() || mats.size() < 2) throw DomainError("oracle", "need >= 2 kernels with kappas");
  std::string d;
  auto fail = [&](const std::string& why) {
    if (rep.passed) rep.details = why;
    rep.passed = false;
  };
  double prev_hs = std::numeric_limits<double>::infinity(), prev_sh = prev_hs;
  double min_entry = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const auto& M = mats[k];
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      for (Eigen::Index i = 0; i < M.rows(); ++i) {
        min_entry = std::min(min_entry, M(i, j));
        if (M(i, j) < -negative_tol) {
          fail("negative entry " + detail::fmt(M(i, j)) + " at (" + std::to_string(i) + ", " + std::to_string(j) +
               ") kappa=" + detail::fmt(kappas[k]));
        }
        if (k > 0 && M(i, j) > mats[k - 1](i, j) + monotone_tol) {
          fail("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") increases from kappa=" +
               detail::fmt(kappas[k - 1]) + " to " + detail::fmt(kappas[k]));
        }
      }
    }
    const double hs = M.norm();
    const double sh = M.rowwise().sum().maxCoeff();
    const double two = spectral_norm(M);
    if (hs > prev_hs) fail("HS norm increases at kappa=" + detail::fmt(kappas[k]));
    if (sh > prev_sh) fail("SH norm increases at kappa=" + detail::fmt(kappas[k]));
    if (two > sh + 1e-8) fail("||B||_2 exceeds SH bound at kappa=" + detail::fmt(kappas[k]));
    prev_hs = hs;
    prev_sh = sh;
    d += " [kappa=" + detail::fmt(kappas[k]) + " hs=" + detail::fmt(hs) + " sh=" + detail::fmt(sh) + " two=" + detail::fmt(two) + "]";
  }
  rep.measured = min_entry;
  rep.details = (rep.passed ? std::string("all properties hold;") : rep.details + ";") + d;
  return rep;
}

inline OracleReport kernel_property_scan(const Curve& curve, const std::vector<double>& kappas, const GridSpec& grid) {
  std::vector<Eigen::MatrixXd> mats;
  for (double k : kappas) mats.push_back(kernel_matrix_direct(curve, grid, k));
  return kernel_property_scan(mats, kappas);
}

/// Gaussian samples on the grid nodes.
inline Eigen::VectorXd gaussian_test_vector(const GridSpec& grid, double center, double width) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(grid.N()));
  for (std::size_t i = 0; i < grid.N(); ++i) {
    const double x = (grid.node(i) - center) / width;
    f(static_cast<Eigen::Index>(i)) = std::exp(-0.5 * x * x);
  }
  return f;
}

/// Fraction of the discrete spectral energy of f above half the grid's top momentum.
inline double high_band_fraction(const Eigen::VectorXd& f) {
  const Eigen::Index N = f.size();
  double hi = 0.0, total = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index j = 0; j < N; ++j) {
      acc += f(j) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((n * j) % N) / static_cast<double>(N));
    }
    const double e = std::norm(acc);
    total += e;
    const Eigen::Index freq = n <= N / 2 ? n : N - n;
    if (freq > N / 4) hi += e;
  }
  return total > 0.0 ? hi / total : 0.0;
}

/// <f, K f> - <f, T f> with K the 1D kernel (e^{-kappa|u|} - 1)/(4 pi |u|):
/// the kappa-independent 1/(4 pi |u|) part of the free kernel is dropped.
/// The lag integral of K times the autocorrelation uses the trapezoid rule
/// with Gregory corrections at u = 0.
inline double renormalized_difference(const GridSpec& grid, double kappa, const Eigen::VectorXd& f) {
  const std::size_t N = grid.N();
  const double delta = grid.delta();
  std::vector<double> g(N);
  for (std::size_t k = 0; k < N; ++k) {
    double a = 0.0;
    for (std::size_t i = 0; i + k < N; ++i) a += f(static_cast<Eigen::Index>(i)) * f(static_cast<Eigen::Index>(i + k));
    a *= delta;
    const double u = static_cast<double>(k) * delta;
    const double K = k == 0 ? -kappa / (4.0 * std::numbers::pi) : std::expm1(-kappa * u) / (4.0 * std::numbers::pi * u);
    g[k] = K * a;
  }
  double trap = 0.5 * g[0];
  for (std::size_t k = 1; k < N; ++k) trap += g[k];
  const double d1 = g[1] - g[0];
  const double d2 = g[2] - 2 * g[1] + g[0];
  const double d3 = g[3] - 3 * g[2] + 3 * g[1] - g[0];
  const double d4 = g[4] - 4 * g[3] + 6 * g[2] - 4 * g[1] + g[0];
  const double lag_integral = delta * (trap + d1 / 12.0 - d2 / 24.0 + 19.0 * d3 / 720.0 - 3.0 * d4 / 160.0);
  const Eigen::MatrixXd T = assemble_T(grid, kappa).matrix;
  const double tform = delta * f.dot(T * f);
  return 2.0 * lag_integral - tform;
}

/// The renormalized difference agrees at both kappa values to 1e-6 relative.
/// Test vectors with spectral content above half the grid band are reported
/// as warnings instead of failures.
inline OracleReport kappa_independence_check(const GridSpec& grid, std::pair<double, double> kappas,
                                             const std::vector<Eigen::VectorXd>& test_vectors, double tol = 1e-6) {
  OracleReport rep{"kappa_independence", true, 0.0, 0.0, tol, "", false};
  std::string d;
  for (std::size_t v = 0; v < test_vectors.size(); ++v) {
    const auto& f = test_vectors[v];
    const double a = renormalized_difference(grid, kappas.first, f);
    const double b = renormalized_difference(grid, kappas.second, f);
    const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    const bool resolved = high_band_fraction(f) <= 1e-12;
    rep.measured = std::max(rep.measured, resolved ? rel : 0.0);
    d += " [vector " + std::to_string(v) + " D1=" + detail::fmt(a) + " D2=" + detail::fmt(b) + " rel=" + detail::fmt(rel) +
         (resolved ? "" : " under-resolved") + "]";
    if (rel > tol) {
      if (resolved) rep.passed = false;
      else rep.warning = true;
    }
  }
  rep.details = (rep.warning ? std::string("warning: under-resolved test vector exceeds tolerance;") : std::string()) + d;
  return rep;
}

/// max_n |m_kappa(p_n) - m_kappa'(p_n)| <= |ln(kappa/kappa')| / 2pi.
inline OracleReport multiplier_continuity_check(const GridSpec& grid, double k1, double k2) {
  OracleReport rep{"multiplier_continuity", false, 0.0, 0.0, 1e-12, "", false};
  const long half = static_cast<long>(grid.N() / 2);
  double worst = 0.0;
  for (long n = -half; n < half; ++n) {
    const double p = grid.momentum(n);
    worst = std::max(worst, std::abs(t_multiplier(p, k1) - t_multiplier(p, k2)));
  }
  rep.measured = worst;
  rep.expected = std::abs(std::log(k1 / k2)) / (2.0 * std::numbers::pi);
  rep.passed = worst <= rep.expected + rep.tolerance;
  rep.details = "one-sided bound; kappa=" + detail::fmt(k1) + " kappa'=" + detail::fmt(k2);
  return rep;
}

/// lambda_1(factor * kappa0) < alpha.
inline OracleReport lambda_tail_check(const QFactory& factory, double alpha, double factor = 10.0) {
  OracleReport rep{"lambda_tail", false, 0.0, alpha, 0.0, "", false};
  rep.measured = top_eigenpairs(factory.Q(factor * kappa0(alpha)), 1).values.front();
  rep.passed = rep.measured < alpha;
  rep.details = "one-sided: lambda_1(" + detail::fmt(factor) + " kappa0) < alpha";
  return rep;
}

/// Closed form e^{-kappa R}/(4 pi R) against the Bessel integral.
inline OracleReport macdonald_check(double r, double u, double kappa, double tol = 1e-6) {
  OracleReport rep{"macdonald", false, 0.0, 0.0, tol, "", false};
  rep.expected = green3(std::hypot(r, u), kappa);
  rep.measured = macdonald_integral(r, u, kappa);
  rep.passed = std::abs(rep.measured - rep.expected) <= tol;
  rep.details = "r=" + detail::fmt(r) + " u=" + detail::fmt(u) + " kappa=" + detail::fmt(kappa);
  return rep;
}

/// The oracle suite of the verify command on a given bent curve.
inline std::vector<OracleReport> run_oracle_suite(const Curve& bent) {
  std::vector<OracleReport> out;
  for (double a : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
    for (const GridSpec& g : {GridSpec(16.0, 512), GridSpec(24.0, 1024)}) {
      auto r = straight_line_oracle(a, g);
      r.name += "(alpha=" + detail::fmt(a) + ",L=" + detail::fmt(g.L()) + ",N=" + std::to_string(g.N()) + ")";
      out.push_back(r);
    }
  }
  out.push_back(scaling_inequality_check(bent, 1.2, {0.2, 0.1, 0.05}));
  out.push_back(kernel_property_scan(bent, {1.2, 1.8, 2.4}, GridSpec(16.0, 512)));
  {
    const GridSpec g(16.0, 512);
    out.push_back(kappa_independence_check(g, {1.0, 2.0}, {gaussian_test_vector(g, 0.0, 1.0), gaussian_test_vector(g, 0.0, 2.0 * g.delta())}));
  }
  for (auto [k1, k2] : {std::pair{1.0, 2.0}, std::pair{1.2, 1.5}, std::pair{0.5, 3.0}}) {
    out.push_back(multiplier_continuity_check(GridSpec(24.0, 1024), k1, k2));
  }
  out.push_back(lambda_tail_check(QFactory(bent, GridSpec(24.0, 1024)), 0.0));
  for (auto [r, u, k] : {std::tuple{1.0, 0.0, 1.0}, std::tuple{0.5, 1.0, 2.0}, std::tuple{2.0, 0.3, 0.7}}) {
    out.push_back(macdonald_check(r, u, k));
  }
  return out;
}

}  // namespace leakywire
