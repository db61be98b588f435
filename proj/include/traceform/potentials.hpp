#pragma once

// Potential operators G^mu, their sup norms on evaluation grids, and the exact
// finite realization S = W^{1/2} G W^{1/2} of K^mu on L^2(mu).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/kernels.hpp"
#include "traceform/measures.hpp"

namespace traceform {

/// Finite stand-in for sup over the whole space. Always extended with the
/// support points of the measures it is used with.
class EvaluationGrid {
 public:
  EvaluationGrid() = default;
  explicit EvaluationGrid(std::vector<Point> points, double step = 0.0)
      : points_(std::move(points)), step_(step) {}

  /// lo, lo+step, ..., hi on the real line plus `extra`.
  static EvaluationGrid uniform_line(double lo, double hi, double step, const std::vector<double>& extra = {}) {
    if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorKind::InvalidArgument, "grid needs step > 0 and hi >= lo");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count + 1) + extra.size());
    for (long i = 0; i <= count; ++i) pts.push_back({lo + static_cast<double>(i) * step});
    for (double x : extra) pts.push_back({x});
    return EvaluationGrid(std::move(pts), step);
  }

  /// Points (r, 0, 0) for r = 0, step, ..., r_max plus `extra` radii. Enough
  /// for radial potentials of concentric spheres.
  static EvaluationGrid radial(double r_max, double step, const std::vector<double>& extra = {}) {
    if (!(step > 0.0) || !(r_max >= 0.0)) throw Error(ErrorKind::InvalidArgument, "radial grid needs step > 0");
    const auto count = static_cast<long>(std::floor(r_max / step + 1e-9));
    std::vector<Point> pts;
    for (long i = 0; i <= count; ++i) pts.push_back({static_cast<double>(i) * step, 0.0, 0.0});
    for (double r : extra) pts.push_back({r, 0.0, 0.0});
    return EvaluationGrid(std::move(pts), step);
  }

  /// Copy of this grid with every support point of `m` appended.
  EvaluationGrid with_support(const Measure& m) const {
    EvaluationGrid g = *this;
    if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
      for (const auto& p : a->points()) g.points_.push_back(p);
    } else {
      for (double r : std::get<SphereFamilyMeasure>(m).radii()) g.points_.push_back({r, 0.0, 0.0});
    }
    return g;
  }

  bool contains_support(const Measure& m) const {
    auto has = [&](const Point& p) { return std::find(points_.begin(), points_.end(), p) != points_.end(); };
    if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
      return std::all_of(a->points().begin(), a->points().end(), has);
    }
    const auto& radii = std::get<SphereFamilyMeasure>(m).radii();
    return std::all_of(radii.begin(), radii.end(), [&](double r) { return has(Point{r, 0.0, 0.0}); });
  }

  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double step() const noexcept { return step_; }

 private:
  std::vector<Point> points_;
  double step_ = 0.0;
};

namespace detail {

inline void require_sphere_kernel(const Kernel& k) {
  if (k.type() != KernelType::Newtonian || k.dimension() != 3) {
    throw Error(ErrorKind::UnsupportedMeasure, "sphere families require the newtonian kernel in d = 3");
  }
}

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Row of kernel values G(x, y_j) against every support element y_j of `m`.
/// For spheres the entry is the potential of the unit-mass sphere at x.
inline std::vector<double> kernel_to_support(const Kernel& k, const Measure& m, std::span<const double> x) {
  std::vector<double> row(support_size(m));
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    for (std::size_t j = 0; j < a->size(); ++j) row[j] = k(x, a->points()[j]);
  } else {
    detail::require_sphere_kernel(k);
    if (x.size() != 3) throw Error(ErrorKind::DimensionMismatch, "sphere potentials need points in R^3");
    const double r = detail::norm(x);
    const auto& radii = std::get<SphereFamilyMeasure>(m).radii();
    for (std::size_t j = 0; j < radii.size(); ++j) row[j] = sphere_unit_potential(radii[j], r);
  }
  return row;
}

/// G^mu u (x) = integral of G(x, y) u(y) dmu(y); `u` holds one value per atom or sphere.
inline double potential_apply(const Kernel& k, const Measure& m, std::span<const double> u, std::span<const double> x) {
  if (u.size() != support_size(m)) {
    throw Error(ErrorKind::DimensionMismatch, "need one density value per support element");
  }
  const auto row = kernel_to_support(k, m, x);
  const auto& w = measure_weights(m);
  double s = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * w[j] * u[j];
  return s;
}

/// G^mu 1 (x).
inline double potential_one(const Kernel& k, const Measure& m, std::span<const double> x) {
  const auto row = kernel_to_support(k, m, x);
  const auto& w = measure_weights(m);
  double s = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * w[j];
  return s;
}

/// max over the grid of G^mu 1. This is both the Hardy upper bound and the
/// error currency ||G^nu 1||_inf of the convergence estimates.
inline double potential_one_sup(const Kernel& k, const Measure& m, const EvaluationGrid& grid) {
  if (support_size(m) == 0) return 0.0;
  double best = 0.0;
  for (const auto& x : grid.points()) best = std::max(best, potential_one(k, m, x));
  return best;
}

/// Weighted kernel matrix S_jk = sqrt(w_j) G(x_j, x_k) sqrt(w_k), symmetric
/// and positive semidefinite; its spectrum is the spectrum of K^mu.
struct SymmetricOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd sqrt_weights;
  Measure support;

  Eigen::Index size() const noexcept { return matrix.rows(); }
};

inline SymmetricOperator operator_matrix(const Kernel& k, const Measure& m) {
  const std::size_t n = support_size(m);
  Eigen::MatrixXd s(n, n);
  Eigen::VectorXd sw(n);
  const auto& w = measure_weights(m);
  for (std::size_t j = 0; j < n; ++j) sw(j) = std::sqrt(w[j]);

  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    if (k.beta() > 0.0) {
      throw Error(ErrorKind::PolarAtomicSupport,
                  "atoms carry zero capacity for the singular kernel " + k.name());
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = j; l < n; ++l) {
        const double v = sw(j) * k(a->points()[j], a->points()[l]) * sw(l);
        s(j, l) = v;
        s(l, j) = v;
      }
    }
  } else {
    detail::require_sphere_kernel(k);
    const auto& radii = std::get<SphereFamilyMeasure>(m).radii();
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = j; l < n; ++l) {
        const double v = sw(j) * sw(l) / (4.0 * std::numbers::pi * std::max(radii[j], radii[l]));
        s(j, l) = v;
        s(l, j) = v;
      }
    }
  }
  return {std::move(s), std::move(sw), m};
}

/// Non-symmetric realization M_jk = G(x_j, x_k) w_k of G^mu restricted to the support.
inline Eigen::MatrixXd potential_matrix(const Kernel& k, const Measure& m) {
  const std::size_t n = support_size(m);
  const auto& w = measure_weights(m);
  Eigen::MatrixXd out(n, n);
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    if (k.beta() > 0.0) throw Error(ErrorKind::PolarAtomicSupport, "atoms are polar for " + k.name());
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) out(j, l) = k(a->points()[j], a->points()[l]) * w[l];
  } else {
    detail::require_sphere_kernel(k);
    const auto& radii = std::get<SphereFamilyMeasure>(m).radii();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) out(j, l) = sphere_unit_potential(std::max(radii[j], radii[l]), 0.0) * w[l];
  }
  return out;
}

namespace detail {

inline Eigen::LDLT<Eigen::MatrixXd> shifted_factor(const Eigen::MatrixXd& s, double alpha) {
  if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "resolvent parameter must be >= 0");
  Eigen::MatrixXd a = alpha * s;
  a.diagonal().array() += 1.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(ErrorKind::SingularSystem, "I + alpha S is not positive definite");
  }
  return ldlt;
}

inline void check_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                           double tol) {
  // normwise relative residual
  if ((a * x - b).norm() > tol * (a.norm() * x.norm() + b.norm())) {
    throw Error(ErrorKind::SingularSystem, "linear solve residual above tolerance");
  }
}

}  // namespace detail

/// (I + alpha S)^{-1} S psi: the resolvent R_alpha in weighted coordinates.
inline Eigen::VectorXd resolvent_apply(const SymmetricOperator& op, double alpha, const Eigen::VectorXd& psi,
                                       double tol = 1e-12) {
  if (psi.size() != op.size()) throw Error(ErrorKind::DimensionMismatch, "psi has the wrong length");
  const Eigen::VectorXd rhs = op.matrix * psi;
  if (alpha == 0.0) return rhs;
  auto ldlt = detail::shifted_factor(op.matrix, alpha);
  Eigen::VectorXd x = ldlt.solve(rhs);
  Eigen::MatrixXd a = alpha * op.matrix;
  a.diagonal().array() += 1.0;
  detail::check_residual(a, x, rhs, tol);
  return x;
}

inline Eigen::MatrixXd resolvent_matrix(const SymmetricOperator& op, double alpha, double tol = 1e-12) {
  if (alpha == 0.0) return op.matrix;
  auto ldlt = detail::shifted_factor(op.matrix, alpha);
  Eigen::MatrixXd r = ldlt.solve(op.matrix);
  Eigen::MatrixXd a = alpha * op.matrix;
  a.diagonal().array() += 1.0;
  detail::check_residual(a, r, op.matrix, tol);
  // symmetric in exact arithmetic; remove solver asymmetry
  return 0.5 * (r + r.transpose());
}

/// Matrix of the bounded-function resolvent (1 + alpha G^mu)^{-1} G^mu: maps
/// data u on the support of `m` to the values of the result at `points`.
inline Eigen::MatrixXd bounded_resolvent_operator(const Kernel& k, const Measure& m, double alpha,
                                                  const std::vector<Point>& points) {
  const auto op = operator_matrix(k, m);
  const auto n = op.size();
  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(n, n);
  if (alpha != 0.0) inner = detail::shifted_factor(op.matrix, alpha).solve(inner);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(points.size()), n);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto row = kernel_to_support(k, m, points[i]);
    for (Eigen::Index j = 0; j < n; ++j) rows(static_cast<Eigen::Index>(i), j) = row[j] * op.sqrt_weights(j);
  }
  // v(x) = sum_j G(x,x_j) sqrt(w_j) [(I + alpha S)^{-1} W^{1/2} u]_j
  return rows * inner * op.sqrt_weights.asDiagonal();
}

struct HardyBounds {
  double lower = 0.0;  ///< ||K^mu||, the best Hardy constant
  double upper = 0.0;  ///< ||G^mu 1||_inf on the grid
};

inline HardyBounds hardy_constant_bounds(const Kernel& k, const Measure& m, const EvaluationGrid& grid) {
  if (support_size(m) == 0) return {};
  const auto op = operator_matrix(k, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "eigensolver did not converge");
  return {es.eigenvalues().maxCoeff(), potential_one_sup(k, m, grid.with_support(m))};
}

}  // namespace traceform
