#pragma once

// Stationary solutions of -Delta u_n + alpha u_n mu_n = u mu_n in R^3 for
// concentric sphere families, through u_n = (1 + alpha G^mu)^{-1} G^mu u.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/kernels.hpp"
#include "traceform/measures.hpp"
#include "traceform/potentials.hpp"

namespace traceform::stationary {

/// u_n(x) = sum_i m_i v_i / (4 pi max(R_i, |x|)), with v = u - alpha u_n on
/// the spheres (the density of -Delta u_n).
class StationarySolutionField {
 public:
  StationarySolutionField(SphereFamilyMeasure measure, double alpha, std::vector<double> data,
                          std::vector<double> sphere_values)
      : measure_(std::move(measure)), alpha_(alpha), data_(std::move(data)), sphere_values_(std::move(sphere_values)) {
    density_.resize(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) density_[i] = data_[i] - alpha_ * sphere_values_[i];
  }

  double operator()(double r) const {
    double s = 0.0;
    for (std::size_t i = 0; i < density_.size(); ++i) {
      s += measure_.masses()[i] * density_[i] * sphere_unit_potential(measure_.radii()[i], std::abs(r));
    }
    return s;
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != 3) throw Error(ErrorKind::DimensionMismatch, "field lives in R^3");
    return (*this)(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  }

  const SphereFamilyMeasure& measure() const noexcept { return measure_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<double>& data() const noexcept { return data_; }
  /// u_n on each sphere
  const std::vector<double>& sphere_values() const noexcept { return sphere_values_; }
  const std::vector<double>& density() const noexcept { return density_; }

  /// Leading far-field coefficient: u_n(x) |x| -> sum_i m_i v_i / (4 pi).
  double far_field_charge() const {
    double s = 0.0;
    for (std::size_t i = 0; i < density_.size(); ++i) s += measure_.masses()[i] * density_[i];
    return s / (4.0 * std::numbers::pi);
  }

 private:
  SphereFamilyMeasure measure_;
  double alpha_;
  std::vector<double> data_;
  std::vector<double> sphere_values_;
  std::vector<double> density_;
};

/// Radial data u given per sphere.
inline StationarySolutionField stationary_solve(const SphereFamilyMeasure& measure, double alpha,
                                                const std::vector<double>& u) {
  if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
  if (u.size() != measure.size()) throw Error(ErrorKind::DimensionMismatch, "need one data value per sphere");
  if (measure.empty()) return StationarySolutionField(measure, alpha, {}, {});
  const auto op = operator_matrix(Kernel::newtonian(3), Measure{measure});
  Eigen::VectorXd psi(op.size());
  for (Eigen::Index i = 0; i < op.size(); ++i) psi(i) = op.sqrt_weights(i) * u[static_cast<std::size_t>(i)];
  // (I + alpha M)^{-1} M = W^{-1/2} (I + alpha S)^{-1} S W^{1/2}
  const Eigen::VectorXd y = resolvent_apply(op, alpha, psi);
  std::vector<double> values(u.size());
  for (Eigen::Index i = 0; i < op.size(); ++i) values[static_cast<std::size_t>(i)] = y(i) / op.sqrt_weights(i);
  return StationarySolutionField(measure, alpha, u, std::move(values));
}

inline StationarySolutionField stationary_solve(const SphereFamilyMeasure& measure, double alpha,
                                                const std::function<double(double)>& radial_data) {
  std::vector<double> u;
  for (double r : measure.radii()) u.push_back(radial_data(r));
  return stationary_solve(measure, alpha, u);
}

/// max over points of |7-point Laplacian of f| / |f|. Points must keep a
/// distance > 2h from every sphere of `radii`.
template <class F>
double harmonicity_residual(F&& f, const std::vector<Point>& points, double h, std::span<const double> radii) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "h must be > 0");
  double worst = 0.0;
  for (const auto& x : points) {
    if (x.size() != 3) throw Error(ErrorKind::DimensionMismatch, "test points must lie in R^3");
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    for (double rad : radii) {
      if (std::abs(r - rad) <= 2.0 * h) {
        throw Error(ErrorKind::PointTooCloseToSupport, "test point within 2h of a sphere");
      }
    }
    const double centre = f(std::span<const double>(x));
    double acc = -6.0 * centre;
    for (int axis = 0; axis < 3; ++axis) {
      for (double sgn : {-1.0, 1.0}) {
        Point y = x;
        y[static_cast<std::size_t>(axis)] += sgn * h;
        acc += f(std::span<const double>(y));
      }
    }
    const double lap = std::abs(acc) / (h * h);
    worst = std::max(worst, lap);
  }
  return worst;
}

inline double harmonicity_residual(const StationarySolutionField& field, const std::vector<Point>& points, double h) {
  return harmonicity_residual([&](std::span<const double> x) { return field(x); }, points, h,
                              field.measure().radii());
}

/// max |u_n + alpha G^mu u_n - G^mu u| over the spheres and `points`, where
/// u_n on the support is the solved sphere values.
inline double resolvent_identity_residual(const StationarySolutionField& field, const std::vector<double>& radii) {
  const auto& m = field.measure();
  auto residual_at = [&](double r) {
    double g_un = 0.0, g_u = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double g = m.masses()[j] * sphere_unit_potential(m.radii()[j], r);
      g_un += g * field.sphere_values()[j];
      g_u += g * field.data()[j];
    }
    const double un = field(r);
    return std::abs(un + field.alpha() * g_un - g_u);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    worst = std::max(worst, residual_at(m.radii()[i]));
    // the evaluator must reproduce the solved value on the sphere itself
    worst = std::max(worst, std::abs(field(m.radii()[i]) - field.sphere_values()[i]));
  }
  for (double r : radii) worst = std::max(worst, residual_at(r));
  return worst;
}

/// d/dr u_n(R_i-) - d/dr u_n(R_i+) from one-sided differences of step h.
/// The distributional equation fixes it to (u_i - alpha u_n(R_i)) m_i / (4 pi R_i^2).
inline double radial_derivative_jump(const StationarySolutionField& field, std::size_t i, double h) {
  const double r = field.measure().radii().at(i);
  const double inner = (field(r) - field(r - h)) / h;
  const double outer = (field(r + h) - field(r)) / h;
  return inner - outer;
}

struct StationaryCompareRow {
  int n = 0;
  double sup_difference = 0.0;  ///< sup over the grid of |u_n - u_inf|
  double bound = 0.0;           ///< ||u||_inf ||G^{nu_n} 1||_inf
  bool pass = false;
};

struct StationaryCompareReport {
  std::vector<StationaryCompareRow> rows;
  bool all_pass = true;
  bool monotone = true;  ///< sup differences nonincreasing in n
};

inline StationaryCompareReport stationary_compare(const MeasureSequence& seq, double alpha,
                                                  const std::function<double(double)>& u,
                                                  const EvaluationGrid& grid, double tol = 1e-12) {
  if (!std::holds_alternative<SphereFamilyMeasure>(seq.limit())) {
    throw Error(ErrorKind::UnsupportedMeasure, "stationary comparison needs sphere families");
  }
  const auto kernel = Kernel::newtonian(3);
  const auto& limit = std::get<SphereFamilyMeasure>(seq.limit());
  const auto field_inf = stationary_solve(limit, alpha, u);

  double u_sup = 0.0;
  for (double r : limit.radii()) u_sup = std::max(u_sup, std::abs(u(r)));
  for (const auto& t : seq.terms()) {
    for (double r : std::get<SphereFamilyMeasure>(t).radii()) u_sup = std::max(u_sup, std::abs(u(r)));
  }

  StationaryCompareReport report;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& term = std::get<SphereFamilyMeasure>(seq.term(i));
    const auto field = stationary_solve(term, alpha, u);
    const EvaluationGrid g = grid.with_support(seq.limit()).with_support(seq.term(i));
    StationaryCompareRow row;
    row.n = seq.labels()[i];
    for (const auto& x : g.points()) row.sup_difference = std::max(row.sup_difference, std::abs(field(x) - field_inf(x)));
    row.bound = u_sup * potential_one_sup(kernel, seq.difference(i), g);
    row.pass = row.sup_difference <= row.bound + tol;
    report.all_pass = report.all_pass && row.pass;
    if (!report.rows.empty() && row.sup_difference > report.rows.back().sup_difference + tol) report.monotone = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace traceform::stationary
