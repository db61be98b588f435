#pragma once

// Dirichlet-to-Neumann spectrum of -Delta + 1 on the unit ball of R^3,
//   E_m = m + 2 sum_k 1 / (1 + j_{mk}^2),   multiplicity 2m + 1,
// where j_{mk} are the positive zeros of the spherical Bessel function j_m,
// and the potential gap of the shell {1 - 1/n < |y| < 1}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/quadrature.hpp"

namespace traceform::ball {

/// Spherical Bessel function of the first kind. Upward recurrence from
/// j_0, j_1 where it is stable (x > m), power series otherwise.
inline double spherical_bessel_j(int m, double x) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (std::abs(x) > m) {
    const double s = std::sin(x), c = std::cos(x);
    double j0 = s / x;
    if (m == 0) return j0;
    double j1 = s / (x * x) - c / x;
    for (int l = 1; l < m; ++l) {
      const double j2 = (2.0 * l + 1.0) / x * j1 - j0;
      j0 = j1;
      j1 = j2;
    }
    return j1;
  }
  // x^m / (2m+1)!! * sum_k (-x^2/2)^k / (k! (2m+3)(2m+5)...(2m+2k+1))
  double lead = 1.0;
  for (int l = 1; l <= m; ++l) lead *= x / (2.0 * l + 1.0);
  double term = 1.0, sum = 1.0;
  const double q = -0.5 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (2.0 * m + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

/// First `count` positive zeros of j_m, ascending. Zero k lies in
/// (k pi, (k + m/2) pi] (equality for m = 0); it is bracketed by scanning
/// from the previous zero in steps of pi/6, below the zero spacing (> pi),
/// then bisected to full double precision.
inline std::vector<double> spherical_bessel_zeros(int m, int count) {
  if (m < 0 || count < 1) throw Error(ErrorKind::InvalidArgument, "need m >= 0 and count >= 1");
  const double pi = std::numbers::pi;
  const double step = pi / 6.0;
  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(count));
  double prev = m - 0.5;  // j_{m,1} > m + 1/2
  for (int k = 1; k <= count; ++k) {
    const double upper = (k + 0.5 * m) * pi * (1.0 + 1e-12) + 1e-12;
    double a = std::max((k - 0.5) * pi, prev + 1.0);
    double fa = spherical_bessel_j(m, a);
    double b = a;
    double fb = fa;
    bool found = false;
    while (b < upper + step) {
      b = a + step;
      fb = spherical_bessel_j(m, b);
      if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
        found = true;
        break;
      }
      a = b;
      fa = fb;
    }
    if (!found) {
      throw Error(ErrorKind::BracketFailure,
                  "no sign change for zero " + std::to_string(k) + " of j_" + std::to_string(m));
    }
    if (fa == 0.0) b = a;
    while (true) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = spherical_bessel_j(m, mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    prev = 0.5 * (a + b);
    zeros.push_back(prev);
  }
  return zeros;
}

struct BallEigenvalue {
  int m = 0;
  std::vector<double> zeros;  ///< the j_{mk} summed explicitly
  double value = 0.0;
  double tail_bound = 0.0;  ///< certified |value - exact|, up to rounding
  int multiplicity = 1;
};

namespace detail {

/// sum_{j >= 1} 1 / (1 + j^2 pi^2) = (coth 1 - 1) / 2
inline double integer_shift_total() { return 0.5 * (1.0 / std::tanh(1.0) - 1.0); }

/// sum_{j >= 0} 1 / (1 + (j + 1/2)^2 pi^2) = tanh(1) / 2
inline double half_shift_total() { return 0.5 * std::tanh(1.0); }

inline double term(double x) { return 1.0 / (1.0 + x * x); }

/// sum_{k > K} 1 / (1 + (k + m/2)^2 pi^2), closed form minus partial sum.
inline double shifted_tail(int m, long K) {
  const double pi = std::numbers::pi;
  double partial = 0.0;
  if (m % 2 == 0) {
    const long last = K + m / 2;
    for (long j = last; j >= 1; --j) partial += term(j * pi);
    return integer_shift_total() - partial;
  }
  const long last = K + (m - 1) / 2;  // k + m/2 = j + 1/2
  for (long j = last; j >= 0; --j) partial += term((j + 0.5) * pi);
  return half_shift_total() - partial;
}

}  // namespace detail

/// E_m to within `tol`. The tail sum over k > K is bracketed using
/// k pi < j_{mk} <= (k + m/2) pi; the midpoint is added and the half-width
/// (doubled by the series prefactor) is reported as tail_bound.
inline BallEigenvalue ball_eigenvalue(int m, double tol) {
  if (m < 0 || !(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "need m >= 0 and tol > 0");
  long K = 16;
  double upper = 0.0, lower = 0.0;
  constexpr long kMaxTerms = 10'000'000;
  while (true) {
    upper = detail::shifted_tail(0, K);
    lower = detail::shifted_tail(m, K);
    if (upper - lower < tol || K >= kMaxTerms) break;
    // half-width decays like m / (4 pi^2 K^2)
    const double grow = std::sqrt((upper - lower) / tol) * 1.1;
    K = std::min(kMaxTerms, std::max(K * 2, static_cast<long>(std::ceil(K * grow))));
  }
  if (upper - lower >= tol) throw Error(ErrorKind::InvalidArgument, "tolerance below attainable accuracy");

  BallEigenvalue ev;
  ev.m = m;
  ev.multiplicity = 2 * m + 1;
  ev.zeros = spherical_bessel_zeros(m, static_cast<int>(K));
  double sum = 0.0;
  // smallest terms first
  for (auto it = ev.zeros.rbegin(); it != ev.zeros.rend(); ++it) sum += detail::term(*it);
  sum += 0.5 * (upper + lower);
  ev.value = m + 2.0 * sum;
  ev.tail_bound = upper - lower;
  return ev;
}

/// int over {1 - 1/n < |y| < 1} of |x - y|^{-1} dy at |x| = r, by product
/// Gauss-Legendre quadrature in the radius s of y and in sigma, where the
/// polar angle satisfies cos(theta) = 1 - 2 sigma^2 (removes the r = s
/// singularity of the angular integral). Both directions are split at the
/// near-singular point so each panel is smooth.
inline double annulus_profile(int n, double r, const QuadratureRule& rule) {
  const double pi = std::numbers::pi;
  const double a = 1.0 - 1.0 / n;
  auto angular = [&](double s) {
    auto f = [&](double sig) { return 4.0 * sig / std::sqrt((r - s) * (r - s) + 4.0 * r * s * sig * sig); };
    if (r == 0.0) return 2.0 / s;
    const double c = std::abs(r - s) / (2.0 * std::sqrt(r * s));
    if (c > 0.0 && c < 1.0) return integrate(rule, 0.0, c, f) + integrate(rule, c, 1.0, f);
    return integrate(rule, 0.0, 1.0, f);
  };
  auto radial = [&](double s) { return 2.0 * pi * s * s * angular(s); };
  if (r > a && r < 1.0) return integrate(rule, a, r, radial) + integrate(rule, r, 1.0, radial);
  return integrate(rule, a, 1.0, radial);
}

struct AnnulusGap {
  double value = 0.0;
  double argmax_radius = 0.0;
  std::vector<std::pair<double, double>> profile;  ///< (|x|, integral)
};

/// sup over the closed unit ball of the shell integral; the radial symmetry
/// reduces x to |x| on a uniform grid of `radial_samples` radii in [0, 1]
/// (plus the inner shell radius). `quadrature_points` is the node count of
/// the product rule per evaluation.
inline AnnulusGap annulus_gap_detail(int n, int quadrature_points, int radial_samples = 200) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "shell index n must be >= 2");
  if (quadrature_points < 1000) {
    throw Error(ErrorKind::QuadratureUnderflow, "at least 1000 quadrature points required");
  }
  const int per_axis = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(quadrature_points)) / 2.0));
  const auto rule = gauss_legendre(per_axis);
  std::vector<double> radii;
  for (int i = 0; i <= radial_samples; ++i) radii.push_back(static_cast<double>(i) / radial_samples);
  radii.push_back(1.0 - 1.0 / n);
  std::sort(radii.begin(), radii.end());
  AnnulusGap out;
  for (double r : radii) {
    const double v = annulus_profile(n, r, rule);
    out.profile.emplace_back(r, v);
    if (v > out.value) {
      out.value = v;
      out.argmax_radius = r;
    }
  }
  return out;
}

inline double annulus_potential_gap(int n, int quadrature_points) {
  return annulus_gap_detail(n, quadrature_points).value;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error(ErrorKind::InvalidArgument, "need >= 2 pairs");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace traceform::ball
