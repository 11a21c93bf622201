#pragma once

// Discretized Birman-Schwinger operator Q = T + B on a truncated arc-length grid.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leakywire/curve.hpp"
#include "leakywire/error.hpp"
#include "leakywire/parallel.hpp"

namespace leakywire {

/// Digamma at 1 (minus the Euler-Mascheroni constant).
inline constexpr double kPsi1 = -0.57721566490153286;

inline void require_positive_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("operators", "kappa must be finite and > 0");
}

/// Fourier multiplier of T: (psi(1) + ln 2 - ln sqrt(p^2 + kappa^2)) / 2pi.
inline double t_multiplier(double p, double kappa) {
  require_positive_kappa(kappa);
  return (kPsi1 + std::numbers::ln2 - 0.5 * std::log(p * p + kappa * kappa)) / (2.0 * std::numbers::pi);
}

/// Top of the continuous spectrum of T: (psi(1) - ln(kappa/2)) / 2pi.
inline double s_kappa(double kappa) {
  require_positive_kappa(kappa);
  return (kPsi1 - std::log(0.5 * kappa)) / (2.0 * std::numbers::pi);
}

/// Unique kappa with s_kappa = alpha.
inline double kappa0(double alpha) { return 2.0 * std::exp(kPsi1 - 2.0 * std::numbers::pi * alpha); }

/// Threshold of the essential spectrum.
inline double zeta0(double alpha) {
  const double k = kappa0(alpha);
  return -k * k;
}

/// Uniform midpoint grid on [-L, L] with N nodes.
class GridSpec {
 public:
  GridSpec(double L, std::size_t N) : L_(L), N_(N) {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("operators", "grid half-length must be positive");
    if (N < 2 || N % 2 != 0) throw DomainError("operators", "grid size N must be even and >= 2");
  }

  double L() const { return L_; }
  std::size_t N() const { return N_; }
  double delta() const { return 2.0 * L_ / static_cast<double>(N_); }
  double node(std::size_t i) const { return -L_ + (static_cast<double>(i) + 0.5) * delta(); }
  /// Momentum p_n = pi n / L for n in [-N/2, N/2).
  double momentum(long n) const { return std::numbers::pi * static_cast<double>(n) / L_; }

  std::vector<double> nodes() const {
    std::vector<double> s(N_);
    for (std::size_t i = 0; i < N_; ++i) s[i] = node(i);
    return s;
  }

  bool operator==(const GridSpec&) const = default;

 private:
  double L_;
  std::size_t N_;
};

enum class OperatorKind { T, B, Q };

struct DiscretizedOperator {
  GridSpec grid;
  double kappa;
  OperatorKind kind;
  Eigen::MatrixXd matrix;
};

/// First column t_k of the circulant T; t_k = (1/N) sum_n m(p_n) cos(2 pi n k / N).
inline std::vector<double> t_circulant_column(const GridSpec& grid, double kappa) {
  const std::size_t N = grid.N();
  const long half = static_cast<long>(N / 2);
  std::vector<double> m(N);
  for (long n = -half; n < half; ++n) m[static_cast<std::size_t>(n + half)] = t_multiplier(grid.momentum(n), kappa);
  std::vector<double> cos_table(N);
  for (std::size_t j = 0; j < N; ++j) cos_table[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(N));
  std::vector<double> col(N);
  parallel_for(N, [&](std::size_t k) {
    double acc = 0.0;
    for (long n = -half; n < half; ++n) {
      const long idx = ((n * static_cast<long>(k)) % static_cast<long>(N) + static_cast<long>(N)) % static_cast<long>(N);
      acc += m[static_cast<std::size_t>(n + half)] * cos_table[static_cast<std::size_t>(idx)];
    }
    col[k] = acc / static_cast<double>(N);
  });
  return col;
}

inline DiscretizedOperator assemble_T(const GridSpec& grid, double kappa) {
  require_positive_kappa(kappa);
  const std::size_t N = grid.N();
  const auto col = t_circulant_column(grid, kappa);
  Eigen::MatrixXd M(N, N);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[(i + N - j) % N];
    }
  }
  return {grid, kappa, OperatorKind::T, std::move(M)};
}

/// B(s, s') from the two points and their arc distance sigma > 0. Written as
/// e^{-k rho} [(sigma - rho) - rho expm1(-k (sigma - rho))] / (4 pi rho sigma),
/// which is term-by-term nonnegative.
inline double b_kernel_from_distances(double rho, double sigma, double kappa) {
  if (sigma == 0.0) return 0.0;
  if (!(rho > 1e-12 * std::max(1.0, sigma))) {
    throw SingularGeometryError("operators", "distinct arc-length parameters map to coincident points");
  }
  const double d = std::max(0.0, sigma - rho);
  const double num = d - rho * std::expm1(-kappa * d);
  return std::exp(-kappa * rho) * num / (4.0 * std::numbers::pi * rho * sigma);
}

inline double b_kernel(const Curve& curve, double s, double sp, double kappa) {
  require_positive_kappa(kappa);
  if (s == sp) return 0.0;
  if (curve.is_straight()) return 0.0;
  return b_kernel_from_distances((curve.point(s) - curve.point(sp)).norm(), std::abs(s - sp), kappa);
}

/// Curve points at the grid nodes; reusable across kappa values.
inline std::vector<Vec3> grid_points(const Curve& curve, const GridSpec& grid) {
  std::vector<Vec3> p(grid.N());
  parallel_for(grid.N(), [&](std::size_t i) { p[i] = curve.point(grid.node(i)); });
  return p;
}

inline DiscretizedOperator assemble_B(const Curve& curve, const std::vector<Vec3>& points, const GridSpec& grid,
                                      double kappa) {
  require_positive_kappa(kappa);
  const std::size_t N = grid.N();
  if (points.size() != N) throw DomainError("operators", "point cache does not match grid");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  if (!curve.is_straight()) {
    const double delta = grid.delta();
    parallel_for(N, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        const double sigma = static_cast<double>(j - i) * delta;
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            delta * b_kernel_from_distances((points[i] - points[j]).norm(), sigma, kappa);
      }
    });
    M.triangularView<Eigen::StrictlyLower>() = M.transpose();
  }
  return {grid, kappa, OperatorKind::B, std::move(M)};
}

inline DiscretizedOperator assemble_B(const Curve& curve, const GridSpec& grid, double kappa) {
  return assemble_B(curve, grid_points(curve, grid), grid, kappa);
}

inline DiscretizedOperator assemble_Q(const DiscretizedOperator& T, const DiscretizedOperator& B) {
  if (T.kind != OperatorKind::T || B.kind != OperatorKind::B || !(T.grid == B.grid) || T.kappa != B.kappa) {
    throw DomainError("operators", "assemble_Q needs a T and a B on the same grid and kappa");
  }
  return {T.grid, T.kappa, OperatorKind::Q, T.matrix + B.matrix};
}

inline DiscretizedOperator assemble_Q(const Curve& curve, const GridSpec& grid, double kappa) {
  return assemble_Q(assemble_T(grid, kappa), assemble_B(curve, grid, kappa));
}

inline void require_kind_B(const DiscretizedOperator& op, const char* what) {
  if (op.kind != OperatorKind::B) throw DomainError("operators", std::string(what) + " needs a B operator");
}

/// Grid Hilbert-Schmidt norm (sum_ij Delta^2 B_ij^2)^(1/2).
inline double hs_norm(const DiscretizedOperator& op) {
  require_kind_B(op, "hs_norm");
  return op.matrix.norm();
}

/// Largest row integral max_i sum_j Delta B(s_i, s_j).
inline double schur_holmgren_norm(const DiscretizedOperator& op, double negative_tolerance = 1e-14) {
  require_kind_B(op, "schur_holmgren_norm");
  const auto& M = op.matrix;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (M(i, j) < -negative_tolerance) {
        throw InvalidKernelError("operators", "negative kernel entry " + std::to_string(M(i, j)) + " at (" +
                                                  std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return M.rowwise().sum().maxCoeff();
}

/// Row-major little-endian dump preceded by N as a uint64.
inline void write_matrix_binary(const DiscretizedOperator& op, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("operators", "cannot open " + path + " for writing");
  static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
  const std::uint64_t n = static_cast<std::uint64_t>(op.matrix.rows());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      const double v = op.matrix(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!out) throw ConfigError("operators", "write to " + path + " failed");
}

inline Eigen::MatrixXd read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("operators", "cannot open " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n > (1u << 16)) throw ConfigError("operators", "bad matrix header in " + path);
  Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) in.read(reinterpret_cast<char*>(&M(i, j)), sizeof(double));
  }
  if (!in) throw ConfigError("operators", "truncated matrix file " + path);
  return M;
}

}  // namespace leakywire
