#pragma once

// Bound states from the roots of lambda_j(kappa) = alpha, spectrum scans and
// grid convergence studies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "leakywire/curve.hpp"
#include "leakywire/error.hpp"
#include "leakywire/operators.hpp"
#include "leakywire/spectral.hpp"

namespace leakywire {

struct SolveConfig {
  double alpha = 0.0;
  GridSpec grid{16.0, 1024};
  double kappa_bracket_growth = 2.0;
  double tol_kappa_rel = 1e-10;
  double tol_lambda = 1e-9;
  std::size_t m_branches = 8;
  std::size_t refinement_levels = 3;
  double start_offset = 1e-4;       // bracket start kappa0 (1 + start_offset)
  double edge_offset = 1e-12;       // closest probe to kappa0 for near-threshold branches
  double bracket_limit = 1e6;       // in units of kappa0
  double uncertain_gap_rel = 1e-6;  // gap below this fraction of |zeta0| is flagged
  EigenOptions eigen;

  void validate() const {
    if (!(kappa_bracket_growth > 1.0)) throw ConfigError("solver", "kappa bracket growth must exceed 1");
    if (!(tol_kappa_rel > 0.0) || !(tol_lambda > 0.0)) throw ConfigError("solver", "tolerances must be positive");
    if (m_branches < 1) throw ConfigError("solver", "need at least one branch");
    if (!std::isfinite(alpha)) throw ConfigError("solver", "alpha must be finite");
  }
};

struct BoundStateDiagnostics {
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::uintmax_t iterations = 0;
  double residual = 0.0;  // |lambda_j(kappa_tilde) - alpha|
};

struct BoundState {
  double kappa_tilde = 0.0;
  double energy = 0.0;
  std::size_t branch = 0;  // 1-based index of the eigenvalue curve
  Eigen::VectorXd h;
  double gap = 0.0;  // zeta0 - energy
  bool threshold_uncertain = false;
  BoundStateDiagnostics diagnostics;
};

/// Memoized top-m eigenvalues of Q(kappa) for one curve and grid.
class LambdaEvaluator {
 public:
  LambdaEvaluator(const QFactory& factory, std::size_t m, EigenOptions opt)
      : factory_(factory), m_(std::min(m, factory.grid().N())), opt_(opt) {}

  const std::vector<double>& operator()(double kappa) {
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(kappa);
      if (it != cache_.end()) return it->second;
    }
    auto values = top_eigenpairs(factory_.Q(kappa), m_, opt_).values;
    std::lock_guard lock(mutex_);
    ++solves_;
    return cache_.emplace(kappa, std::move(values)).first->second;
  }

  EigenPairs pairs(double kappa) const { return top_eigenpairs(factory_.Q(kappa), m_, opt_); }
  std::size_t branches() const { return m_; }
  std::size_t solves() const { return solves_; }

 private:
  const QFactory& factory_;
  std::size_t m_;
  EigenOptions opt_;
  std::map<double, std::vector<double>> cache_;
  std::mutex mutex_;
  std::size_t solves_ = 0;
};

namespace detail {

struct RootResult {
  double kappa;
  std::uintmax_t iterations;
};

inline RootResult root_in(LambdaEvaluator& lam, std::size_t j, double alpha, double lo, double hi, double tol_rel) {
  auto f = [&](double k) { return lam(k)[j] - alpha; };
  auto tol = [tol_rel](double a, double b) { return std::abs(b - a) <= tol_rel * std::min(std::abs(a), std::abs(b)); };
  std::uintmax_t iters = 200;
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, 0};
  if (fhi == 0.0) return {hi, 0};
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= 200) throw NumericalFailure("solver", "root finder did not converge");
  return {0.5 * (r.first + r.second), iters};
}

}  // namespace detail

/// All branches j with lambda_j above alpha just above kappa0 are followed to
/// their crossing. Branches that cross only in (kappa0(1+edge), kappa0(1+start))
/// are reported with threshold_uncertain set.
inline std::vector<BoundState> find_bound_states(const QFactory& factory, const SolveConfig& cfg) {
  cfg.validate();
  const double k0 = kappa0(cfg.alpha);
  const double z0 = zeta0(cfg.alpha);
  LambdaEvaluator lam(factory, cfg.m_branches, cfg.eigen);
  const double k_start = k0 * (1.0 + cfg.start_offset);
  const double k_edge = k0 * (1.0 + cfg.edge_offset);
  const std::vector<double> at_start = lam(k_start);

  struct Bracket {
    std::size_t j;
    double lo, hi;
    bool near_edge;
  };
  std::vector<Bracket> brackets;
  std::vector<std::size_t> below;
  for (std::size_t j = 0; j < lam.branches(); ++j) {
    if (at_start[j] > cfg.alpha) {
      double lo = k_start, hi = k_start * cfg.kappa_bracket_growth;
      while (lam(hi)[j] >= cfg.alpha) {
        if (hi > cfg.bracket_limit * k0) {
          throw BracketFailure("solver", "branch " + std::to_string(j + 1) + " has no sign change below " +
                                             std::to_string(cfg.bracket_limit) + " kappa0");
        }
        lo = hi;
        hi *= cfg.kappa_bracket_growth;
      }
      brackets.push_back({j, lo, hi, false});
    } else {
      below.push_back(j);
    }
  }
  if (!below.empty()) {
    const std::vector<double> at_edge = lam(k_edge);
    for (std::size_t j : below) {
      if (at_edge[j] > cfg.alpha) brackets.push_back({j, k_edge, k_start, true});
    }
  }

  std::vector<BoundState> states;
  for (const auto& b : brackets) {
    const auto root = detail::root_in(lam, b.j, cfg.alpha, b.lo, b.hi, cfg.tol_kappa_rel);
    const EigenPairs ep = lam.pairs(root.kappa);
    BoundState st;
    st.kappa_tilde = root.kappa;
    st.energy = -root.kappa * root.kappa;
    st.branch = b.j + 1;
    st.h = ep.vectors.col(static_cast<Eigen::Index>(b.j));
    st.gap = z0 - st.energy;
    st.diagnostics = {b.lo, b.hi, root.iterations, std::abs(ep.values[b.j] - cfg.alpha)};
    st.threshold_uncertain = b.near_edge || st.gap < cfg.uncertain_gap_rel * std::abs(z0);
    if (st.diagnostics.residual > cfg.tol_lambda) {
      throw NumericalFailure("solver", "branch " + std::to_string(st.branch) + " residual " +
                                           std::to_string(st.diagnostics.residual) + " exceeds tol_lambda");
    }
    states.push_back(std::move(st));
  }
  std::sort(states.begin(), states.end(), [](const BoundState& a, const BoundState& b) { return a.energy < b.energy; });
  return states;
}

inline std::vector<BoundState> find_bound_states(const Curve& curve, const SolveConfig& cfg) {
  return find_bound_states(QFactory(curve, cfg.grid), cfg);
}

struct Crossing {
  std::size_t branch = 0;  // 1-based
  double kappa = 0.0;
  double kappa_lo = 0.0;
  double kappa_hi = 0.0;
  int direction = 0;  // -1 when lambda - alpha goes from + to -
};

struct ScanResult {
  SpectralCurve curve;
  double alpha = 0.0;
  std::vector<Crossing> crossings;
};

/// lambda_j on n_points equally spaced kappa in [kappa_min, kappa_max] and every
/// sign change of lambda_j - alpha, refined by root finding.
inline ScanResult spectrum_scan(const QFactory& factory, const SolveConfig& cfg, double kappa_min, double kappa_max,
                                std::size_t n_points) {
  cfg.validate();
  if (!(kappa_min > 0.0) || !(kappa_max > kappa_min)) throw ConfigError("solver", "scan needs 0 < kappa_min < kappa_max");
  if (n_points < 2) throw ConfigError("solver", "scan needs at least 2 points");
  std::vector<double> kappas(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    kappas[k] = kappa_min + (kappa_max - kappa_min) * static_cast<double>(k) / static_cast<double>(n_points - 1);
  }
  ScanResult out{lambda_curve(factory, kappas, cfg.m_branches, cfg.eigen), cfg.alpha, {}};
  LambdaEvaluator lam(factory, cfg.m_branches, cfg.eigen);
  const auto& L = out.curve.lambdas;
  for (std::size_t k = 0; k + 1 < n_points; ++k) {
    for (std::size_t j = 0; j < L[k].size(); ++j) {
      const double a = L[k][j] - cfg.alpha, b = L[k + 1][j] - cfg.alpha;
      if ((a > 0) == (b > 0) && a != 0.0) continue;
      if (a == 0.0 && k > 0) continue;  // counted in the previous interval
      Crossing c{j + 1, kappas[k], kappas[k], kappas[k + 1], b < a ? -1 : 1};
      if (a != 0.0 && b != 0.0) c.kappa = detail::root_in(lam, j, cfg.alpha, kappas[k], kappas[k + 1], cfg.tol_kappa_rel).kappa;
      else if (b == 0.0) c.kappa = kappas[k + 1];
      out.crossings.push_back(c);
    }
  }
  return out;
}

struct ConvergenceLevel {
  double L = 0.0;
  std::size_t N = 0;
  std::optional<double> energy;  // ground state
  std::optional<double> kappa;
  std::size_t n_states = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;  // N refinements at fixed L, then (2N, 1.5L) and (3N, 1.5L)
  std::optional<double> richardson_energy;
  std::optional<double> observed_order;
  std::vector<double> shrink_ratios;
  std::optional<double> tail_change;    // |E(3N, 1.5L) - E(2N, L)|, same Delta
  std::optional<double> tail_estimate;  // |E| exp(-2 q L), q = sqrt(kappa^2 - kappa0^2)
  bool accepted = false;
  bool vacuous = false;
  std::vector<std::string> warnings;
};

/// Ground-state energy on N, 2N, ... (refinement_levels grids) at fixed L, on
/// (2N, 1.5L) and on (3N, 1.5L). Accepted when each N doubling shrinks the
/// energy change by >= 3.
inline ConvergenceReport converge_study(const Curve& curve, const SolveConfig& cfg) {
  cfg.validate();
  if (cfg.refinement_levels < 2) throw ConfigError("solver", "convergence study needs at least 2 levels");
  const double L = cfg.grid.L();
  const std::size_t N = cfg.grid.N();
  std::vector<GridSpec> grids;
  for (std::size_t l = 0; l < cfg.refinement_levels; ++l) grids.emplace_back(L, N << l);
  grids.emplace_back(1.5 * L, 2 * N);
  grids.emplace_back(1.5 * L, 3 * N);

  ConvergenceReport rep;
  for (const auto& g : grids) {
    SolveConfig c = cfg;
    c.grid = g;
    const auto states = find_bound_states(curve, c);
    ConvergenceLevel lv{g.L(), g.N(), {}, {}, states.size()};
    if (!states.empty()) {
      lv.energy = states.front().energy;
      lv.kappa = states.front().kappa_tilde;
    }
    rep.levels.push_back(lv);
  }
  const std::size_t nref = cfg.refinement_levels;
  std::size_t with_state = 0;
  for (const auto& lv : rep.levels) with_state += lv.energy.has_value();
  if (with_state == 0) {
    rep.vacuous = true;
    rep.accepted = true;
    return rep;
  }
  if (with_state != rep.levels.size()) {
    rep.warnings.push_back("ground state missing on some refinement levels");
    return rep;
  }
  std::vector<double> diffs;
  for (std::size_t l = 0; l + 1 < nref; ++l) diffs.push_back(*rep.levels[l + 1].energy - *rep.levels[l].energy);
  rep.accepted = true;
  for (std::size_t l = 0; l + 1 < diffs.size(); ++l) {
    const double r = std::abs(diffs[l]) / std::abs(diffs[l + 1]);
    rep.shrink_ratios.push_back(r);
    if (!(r >= 3.0)) rep.accepted = false;
    if ((diffs[l] > 0) != (diffs[l + 1] > 0)) rep.warnings.push_back("non-monotone refinement");
  }
  if (diffs.size() >= 2) {
    const double d1 = diffs[diffs.size() - 2], d2 = diffs.back();
    const double p = std::log2(std::abs(d1) / std::abs(d2));
    rep.observed_order = p;
    if (std::isfinite(p) && p > 0) rep.richardson_energy = *rep.levels[nref - 1].energy + d2 / (std::pow(2.0, p) - 1.0);
  } else {
    rep.warnings.push_back("two N levels: no observed order");
    rep.accepted = std::abs(diffs.front()) <= 1e-3 * std::abs(*rep.levels.front().energy);
  }
  const auto& wide = rep.levels.back();
  const auto& same_n = rep.levels[1];
  rep.tail_change = std::abs(*wide.energy - *same_n.energy);
  const double k0 = kappa0(cfg.alpha);
  const double q = std::sqrt(std::max(0.0, *same_n.kappa * *same_n.kappa - k0 * k0));
  rep.tail_estimate = std::abs(*same_n.energy) * std::exp(-2.0 * q * L);
  if (*rep.tail_change > *rep.tail_estimate) rep.warnings.push_back("L truncation change exceeds tail estimate");
  return rep;
}

}  // namespace leakywire
