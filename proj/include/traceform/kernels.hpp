#pragma once

// Closed-form Green kernels G(x, y) for transient Dirichlet forms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "traceform/errors.hpp"

namespace traceform {

using Point = std::vector<double>;

inline double distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "points of dimension " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Bound G(x,y) <= c_bound * |x-y|^{-beta} valid for |x-y| < r0.
struct SingularityParams {
  double beta = 0.0;
  double c_bound = 0.0;
  double r0 = std::numeric_limits<double>::infinity();
};

enum class KernelType { Exponential1D, Newtonian, Riesz };

class Kernel {
 public:
  /// G(x,y) = exp(-|x-y|)/2 on the real line; Green function of -u'' + u.
  static Kernel exponential1d() { return Kernel(KernelType::Exponential1D, 1, 0.0, 0.5, 0.0); }

  /// G(x,y) = c_d |x-y|^{2-d} with c_d = Gamma(d/2 - 1) / (4 pi^{d/2}), so -Delta G = delta.
  static Kernel newtonian(int d) {
    if (d < 3) throw Error(ErrorKind::InvalidArgument, "newtonian kernel needs d >= 3");
    const double cd = std::tgamma(0.5 * d - 1.0) / (4.0 * std::pow(std::numbers::pi, 0.5 * d));
    return Kernel(KernelType::Newtonian, d, 0.0, cd, d - 2.0);
  }

  /// Riesz kernel of (-Delta)^{alpha/2}: kappa |x-y|^{alpha-d}, alpha in (0, min(2, d)).
  static Kernel riesz(int d, double alpha) {
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "riesz kernel needs d >= 1");
    if (!(alpha > 0.0) || !(alpha < std::min(2.0, static_cast<double>(d)))) {
      throw Error(ErrorKind::InvalidArgument, "riesz order must lie in (0, min(2, d))");
    }
    const double pi = std::numbers::pi;
    const double kappa = std::tgamma(0.5 * (d - alpha)) /
                         (std::pow(2.0, alpha) * std::pow(pi, 0.5 * d) * std::tgamma(0.5 * alpha));
    return Kernel(KernelType::Riesz, d, alpha, kappa, d - alpha);
  }

  KernelType type() const noexcept { return type_; }
  int dimension() const noexcept { return dim_; }
  double order() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double c_norm() const noexcept { return c_norm_; }

  std::string name() const {
    switch (type_) {
      case KernelType::Exponential1D: return "exponential1d";
      case KernelType::Newtonian: return "newtonian(d=" + std::to_string(dim_) + ")";
      case KernelType::Riesz: return "riesz(d=" + std::to_string(dim_) + ")";
    }
    return "unknown";
  }

  /// All three kernels satisfy the bound with equality-constant c_norm and r0 = +inf.
  SingularityParams singularity_params() const noexcept { return {beta_, c_norm_, std::numeric_limits<double>::infinity()}; }

  /// Kernel as a function of rho = |x - y|. rho = 0 is only finite for beta == 0.
  double at_distance(double rho) const {
    if (type_ == KernelType::Exponential1D) return 0.5 * std::exp(-rho);
    if (rho == 0.0) {
      throw Error(ErrorKind::CoincidentPoints, "kernel is singular on the diagonal (" + name() + ")");
    }
    if (type_ == KernelType::Newtonian) {
      return dim_ == 3 ? c_norm_ / rho : c_norm_ * std::pow(rho, 2.0 - dim_);
    }
    return c_norm_ * std::pow(rho, -beta_);
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != static_cast<std::size_t>(dim_) || y.size() != static_cast<std::size_t>(dim_)) {
      throw Error(ErrorKind::DimensionMismatch,
                  name() + " expects points of dimension " + std::to_string(dim_));
    }
    return at_distance(distance(x, y));
  }

 private:
  Kernel(KernelType type, int dim, double alpha, double c_norm, double beta)
      : type_(type), dim_(dim), alpha_(alpha), c_norm_(c_norm), beta_(beta) {}

  KernelType type_;
  int dim_;
  double alpha_;
  double c_norm_;
  double beta_;
};

inline double kernel_eval(const Kernel& k, std::span<const double> x, std::span<const double> y) { return k(x, y); }

inline SingularityParams kernel_singularity_params(const Kernel& k) { return k.singularity_params(); }

/// A uniformly charged sphere centred at the origin of R^3.
struct Sphere {
  double radius = 1.0;
  double mass = 0.0;
};

/// Exact Newtonian (d = 3) interaction energy of two concentric uniform spheres,
/// m_i m_j / (4 pi max(R_i, R_j)), by Newton's mean-value theorem.
inline double mutual_potential_sphere(const Sphere& a, const Sphere& b) {
  if (!(a.radius > 0.0) || !(b.radius > 0.0)) {
    throw Error(ErrorKind::NonpositiveRadius, "sphere radii must be positive");
  }
  return a.mass * b.mass / (4.0 * std::numbers::pi * std::max(a.radius, b.radius));
}

/// Potential at distance r from the centre of a uniform sphere of unit total mass.
inline double sphere_unit_potential(double radius, double r) {
  return 1.0 / (4.0 * std::numbers::pi * std::max(radius, r));
}

}  // namespace traceform
