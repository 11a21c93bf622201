#pragma once

// Top of the spectrum of symmetric operators and eigenvalue curves in kappa.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "leakywire/curve.hpp"
#include "leakywire/error.hpp"
#include "leakywire/operators.hpp"
#include "leakywire/parallel.hpp"

namespace leakywire {

/// Eigenvalues in descending order; column j of vectors belongs to values[j].
struct EigenPairs {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
  double max_residual = 0.0;
  int iterations = 0;  // 0 for the dense path
};

struct EigenOptions {
  std::size_t dense_limit = 2048;
  double residual_tolerance = 1e-9;  // relative to the infinity norm
  int max_iterations = 20000;
};

inline double inf_norm(const Eigen::MatrixXd& A) { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

/// Flip each column so that its first significant component is positive.
inline void fix_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    const double scale = V.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      if (std::abs(V(i, j)) > 1e-10 * scale) {
        if (V(i, j) < 0) V.col(j) *= -1.0;
        break;
      }
    }
  }
}

namespace detail {

inline EigenPairs dense_top(const Eigen::MatrixXd& A, std::size_t m) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd work = A;
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(m));
  std::vector<lapack_int> isuppz(2 * m);
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, work.data(), n, 0.0, 0.0, n - static_cast<lapack_int>(m) + 1,
                     n, 0.0, &found, w.data(), Z.data(), n, isuppz.data());
  if (info != 0 || found != static_cast<lapack_int>(m)) {
    throw NumericalFailure("spectral", "dense symmetric eigensolver failed (info = " + std::to_string(info) +
                                           ", found " + std::to_string(found) + " of " + std::to_string(m) + ")");
  }
  EigenPairs out;
  out.values.resize(m);
  out.vectors.resize(n, static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    out.values[j] = w[m - 1 - j];
    out.vectors.col(static_cast<Eigen::Index>(j)) = Z.col(static_cast<Eigen::Index>(m - 1 - j));
  }
  return out;
}

// Block subspace iteration on A - cI, c a Gershgorin lower bound, so the top
// of the spectrum of A is the dominant part of the shifted matrix.
inline EigenPairs subspace_top(const Eigen::MatrixXd& A, std::size_t m, const EigenOptions& opt) {
  const Eigen::Index n = A.rows();
  double c = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) c = std::min(c, A(i, i) - (A.row(i).cwiseAbs().sum() - std::abs(A(i, i))));
  const Eigen::Index p = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(m) + std::max<Eigen::Index>(8, static_cast<Eigen::Index>(m)));
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = std::cos(0.37 * static_cast<double>((i + 1) * (j + 1))) + (j == 0 ? 1.0 : 0.0);
  }
  X = Eigen::HouseholderQR<Eigen::MatrixXd>(X).householderQ() * Eigen::MatrixXd::Identity(n, p);
  const double scale = inf_norm(A);
  EigenPairs out;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::MatrixXd Y = A * X - c * X;
    X = Eigen::HouseholderQR<Eigen::MatrixXd>(Y).householderQ() * Eigen::MatrixXd::Identity(n, p);
    if (it % 10 != 0 && it != opt.max_iterations) continue;
    const Eigen::MatrixXd AX = A * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(X.transpose() * AX);
    const Eigen::MatrixXd V = X * rr.eigenvectors();
    double worst = 0.0;
    out.values.assign(m, 0.0);
    out.vectors.resize(n, static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::Index col = p - 1 - static_cast<Eigen::Index>(j);
      const double lam = rr.eigenvalues()(col);
      out.values[j] = lam;
      out.vectors.col(static_cast<Eigen::Index>(j)) = V.col(col);
      worst = std::max(worst, (A * V.col(col) - lam * V.col(col)).norm());
    }
    X = V;
    out.iterations = it;
    if (worst <= opt.residual_tolerance * scale) return out;
  }
  throw NumericalFailure("spectral", "subspace iteration did not converge in " + std::to_string(opt.max_iterations) +
                                         " iterations");
}

}  // namespace detail

/// The m largest eigenpairs of a symmetric matrix, descending, orthonormal
/// vectors with fixed signs. Each residual ||Av - lambda v|| is checked.
inline EigenPairs top_eigenpairs(const Eigen::MatrixXd& A, std::size_t m, const EigenOptions& opt = {}) {
  const std::size_t n = static_cast<std::size_t>(A.rows());
  if (A.rows() != A.cols() || n == 0) throw DomainError("spectral", "matrix must be square and nonempty");
  if (m < 1 || m > n) throw DomainError("spectral", "need 1 <= m <= N");
  EigenPairs out = n <= opt.dense_limit ? detail::dense_top(A, m) : detail::subspace_top(A, m, opt);
  fix_signs(out.vectors);
  const double scale = std::max(inf_norm(A), std::numeric_limits<double>::min());
  for (std::size_t j = 0; j < m; ++j) {
    const auto v = out.vectors.col(static_cast<Eigen::Index>(j));
    const double r = (A * v - out.values[j] * v).norm();
    out.max_residual = std::max(out.max_residual, r);
  }
  if (out.max_residual > opt.residual_tolerance * scale) {
    throw NumericalFailure("spectral", "eigenpair residual " + std::to_string(out.max_residual) +
                                           " exceeds tolerance " + std::to_string(opt.residual_tolerance * scale));
  }
  return out;
}

inline EigenPairs top_eigenpairs(const DiscretizedOperator& op, std::size_t m, const EigenOptions& opt = {}) {
  return top_eigenpairs(op.matrix, m, opt);
}

/// Largest |eigenvalue| of a symmetric matrix.
inline double spectral_norm(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Reorders columns inside clusters of (nearly) equal eigenvalues so that
/// each column best overlaps the same column of the previous sample.
inline void align_degenerate(EigenPairs& cur, const Eigen::MatrixXd& prev, double cluster_tol) {
  const std::size_t m = cur.values.size();
  std::size_t start = 0;
  while (start < m) {
    std::size_t end = start + 1;
    while (end < m && std::abs(cur.values[end - 1] - cur.values[end]) <= cluster_tol) ++end;
    if (end - start > 1) {
      std::vector<std::size_t> free_cols;
      for (std::size_t j = start; j < end; ++j) free_cols.push_back(j);
      std::vector<std::size_t> assign(end - start);
      for (std::size_t a = start; a < end; ++a) {
        auto best = std::max_element(free_cols.begin(), free_cols.end(), [&](std::size_t x, std::size_t y) {
          return std::abs(prev.col(static_cast<Eigen::Index>(a)).dot(cur.vectors.col(static_cast<Eigen::Index>(x)))) <
                 std::abs(prev.col(static_cast<Eigen::Index>(a)).dot(cur.vectors.col(static_cast<Eigen::Index>(y))));
        });
        assign[a - start] = *best;
        free_cols.erase(best);
      }
      Eigen::MatrixXd block(cur.vectors.rows(), static_cast<Eigen::Index>(end - start));
      std::vector<double> vals(end - start);
      for (std::size_t a = 0; a < assign.size(); ++a) {
        block.col(static_cast<Eigen::Index>(a)) = cur.vectors.col(static_cast<Eigen::Index>(assign[a]));
        vals[a] = cur.values[assign[a]];
      }
      for (std::size_t a = 0; a < assign.size(); ++a) {
        cur.vectors.col(static_cast<Eigen::Index>(start + a)) = block.col(static_cast<Eigen::Index>(a));
        cur.values[start + a] = vals[a];
      }
    }
    start = end;
  }
}

struct SpectralCurve {
  GridSpec grid;
  std::vector<double> kappas;
  std::vector<std::vector<double>> lambdas;  // lambdas[k][j] = lambda_{j+1}(kappas[k])
  std::vector<double> s_k_values;
};

/// Operator factory for one curve on one grid; the node positions are cached.
class QFactory {
 public:
  QFactory(Curve curve, GridSpec grid) : curve_(std::move(curve)), grid_(grid), points_(grid_points(curve_, grid_)) {}

  DiscretizedOperator T(double kappa) const { return assemble_T(grid_, kappa); }
  DiscretizedOperator B(double kappa) const { return assemble_B(curve_, points_, grid_, kappa); }
  DiscretizedOperator Q(double kappa) const { return assemble_Q(T(kappa), B(kappa)); }

  const Curve& curve() const { return curve_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  Curve curve_;
  GridSpec grid_;
  std::vector<Vec3> points_;
};

inline SpectralCurve lambda_curve(const QFactory& factory, const std::vector<double>& kappas, std::size_t m,
                                  const EigenOptions& opt = {}) {
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    require_positive_kappa(kappas[k]);
    if (k > 0 && !(kappas[k] > kappas[k - 1])) throw DomainError("spectral", "kappa list must be ascending");
  }
  m = std::min(m, factory.grid().N());
  std::vector<EigenPairs> pairs(kappas.size());
  parallel_for(kappas.size(), [&](std::size_t k) { pairs[k] = top_eigenpairs(factory.Q(kappas[k]), m, opt); });
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const double tol = 1e-8 * std::max(1.0, std::abs(pairs[k].values.front()));
    align_degenerate(pairs[k], pairs[k - 1].vectors, tol);
  }
  SpectralCurve sc{factory.grid(), kappas, {}, {}};
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    sc.lambdas.push_back(pairs[k].values);
    sc.s_k_values.push_back(s_kappa(kappas[k]));
  }
  return sc;
}

inline SpectralCurve lambda_curve(const Curve& curve, const GridSpec& grid, const std::vector<double>& kappas,
                                  std::size_t m, const EigenOptions& opt = {}) {
  return lambda_curve(QFactory(curve, grid), kappas, m, opt);
}

}  // namespace leakywire
