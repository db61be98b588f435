#pragma once

// Admissibility tests for finite measures against kernels with
// G(x, y) <= c |x - y|^{-beta}:
//   * sup-integral criterion  lim_{r->0} sup_x int_{B_r(x)} |x-y|^{-beta} dmu(y) = 0
//   * volume growth  mu(B_r(x)) <= c' r^s  with s > beta.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/kernels.hpp"
#include "traceform/measures.hpp"
#include "traceform/potentials.hpp"

namespace traceform::kato {

/// Lebesgue measure on [lo, hi] in R. Only used by the Kato tests to exercise
/// the passing branch for beta > 0; the spectral modules do not accept it.
struct LebesgueInterval {
  double lo = 0.0;
  double hi = 1.0;
};

using KatoMeasure = std::variant<AtomicMeasure, SphereFamilyMeasure, LebesgueInterval>;

inline KatoMeasure from_measure(const Measure& m) {
  return std::visit([](const auto& v) -> KatoMeasure { return v; }, m);
}

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// int_{t0}^{t1} t^{p} dt for 0 <= t0 <= t1, +inf when divergent at 0.
inline double power_integral(double t0, double t1, double p) {
  if (!(t1 > t0)) return 0.0;
  if (p == -1.0) return t0 == 0.0 ? kInf : std::log(t1 / t0);
  if (p < -1.0 && t0 == 0.0) return kInf;
  return (std::pow(t1, p + 1.0) - (t0 == 0.0 ? 0.0 : std::pow(t0, p + 1.0))) / (p + 1.0);
}

inline double norm(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// int_{B_r(x)} |x - y|^{-beta} dmu(y); beta = 0 gives mu(B_r(x)).
inline double ball_integral(const KatoMeasure& m, const Point& x, double r, double beta) {
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    double s = 0.0;
    for (std::size_t j = 0; j < a->size(); ++j) {
      const double rho = distance(x, a->points()[j]);
      if (rho >= r) continue;
      if (rho == 0.0 && beta > 0.0) return kInf;
      s += a->weights()[j] * (beta == 0.0 ? 1.0 : std::pow(rho, -beta));
    }
    return s;
  }
  if (const auto* l = std::get_if<LebesgueInterval>(&m)) {
    if (x.size() != 1) throw Error(ErrorKind::DimensionMismatch, "interval measure lives in R");
    const double c = x[0];
    double s = 0.0;
    // right of x: distances in [max(lo,c) - c, min(hi, c + r) - c]
    const double r0 = std::max(l->lo, c) - c, r1 = std::min(l->hi, c + r) - c;
    if (r1 > r0) s += power_integral(r0, r1, -beta);
    // left of x
    const double l0 = c - std::min(l->hi, c), l1 = c - std::max(l->lo, c - r);
    if (l1 > l0) s += power_integral(l0, l1, -beta);
    return s;
  }
  const auto& sp = std::get<SphereFamilyMeasure>(m);
  if (x.size() != 3) throw Error(ErrorKind::DimensionMismatch, "sphere families live in R^3");
  const double t = norm(x);
  double s = 0.0;
  for (std::size_t j = 0; j < sp.size(); ++j) {
    const double rad = sp.radii()[j];
    const double density = sp.masses()[j] / (4.0 * std::numbers::pi * rad * rad);
    if (t == 0.0) {
      if (rad < r) s += sp.masses()[j] * std::pow(rad, -beta);
      continue;
    }
    // surface element in terms of rho = |x - y|: dsigma = (2 pi R / t) rho drho
    const double lo = std::abs(t - rad);
    const double hi = std::min(t + rad, r);
    if (hi > lo) s += density * (2.0 * std::numbers::pi * rad / t) * power_integral(lo, hi, 1.0 - beta);
  }
  return s;
}

}  // namespace detail

/// sup over the grid of int_{B_r(x)} |x - y|^{-beta} dmu(y); +inf when an atom
/// sits on a grid point and beta > 0.
inline double kato_sup_integral(const Kernel& kernel, const KatoMeasure& m, double r, const EvaluationGrid& grid) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
  const double beta = kernel.singularity_params().beta;
  double best = 0.0;
  for (const auto& x : grid.points()) {
    best = std::max(best, detail::ball_integral(m, x, r, beta));
    if (std::isinf(best)) break;
  }
  return best;
}

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct GrowthEstimate {
  double s = 0.0;
  double c_prime = 0.0;
};

struct KatoReport {
  std::vector<double> radii;
  std::vector<double> sup_integrals;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
  std::optional<GrowthEstimate> growth;
};

/// pass: values fall below tol; fail: a value is +inf or the tail plateaus
/// (last >= 0.9 * previous) above tol; inconclusive otherwise.
inline KatoReport kato_check(const Kernel& kernel, const KatoMeasure& m, const std::vector<double>& radii,
                             const EvaluationGrid& grid, double tol) {
  if (radii.empty()) throw Error(ErrorKind::InvalidArgument, "empty radius schedule");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw Error(ErrorKind::InvalidArgument, "radii must decrease");
  }
  KatoReport rep;
  rep.radii = radii;
  for (double r : radii) rep.sup_integrals.push_back(kato_sup_integral(kernel, m, r, grid));

  if (kernel.singularity_params().beta == 0.0) {
    rep.verdict = Verdict::Pass;
    rep.note = "bounded kernel: every finite measure has a bounded continuous potential vanishing at infinity";
    return rep;
  }
  const auto& v = rep.sup_integrals;
  if (std::any_of(v.begin(), v.end(), [](double x) { return std::isinf(x); })) {
    rep.verdict = Verdict::Fail;
    rep.note = "sup-integral is infinite: the measure charges a point on the kernel singularity";
  } else if (v.back() < tol) {
    rep.verdict = Verdict::Pass;
    rep.note = "sup-integrals decrease below tolerance";
  } else if (v.size() >= 2 && v.back() >= 0.9 * v[v.size() - 2]) {
    rep.verdict = Verdict::Fail;
    rep.note = "sup-integrals plateau above tolerance";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "sup-integrals still decreasing but above tolerance; refine the schedule";
  }
  return rep;
}

struct VolumeGrowthResult {
  double c_prime = 0.0;  ///< max_{x,r} mu(B_r(x)) / r^s, +inf when growth is unbounded as r -> 0
  bool pass = false;
  double slope = 0.0;  ///< log-log slope of q(r) = max_x mu(B_r(x)) / r^s against r
  std::vector<double> ratios;
};

/// Volume growth mu(B_r(x)) <= c' r^s on the schedule. The bound counts as
/// finite when q(r) does not grow as r -> 0 (fitted log-log slope >= -0.05;
/// an atom gives slope -s). Passing also requires s > beta.
inline VolumeGrowthResult volume_growth_check(const KatoMeasure& m, double s, double beta, const EvaluationGrid& grid,
                                              const std::vector<double>& radii) {
  if (radii.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two radii");
  VolumeGrowthResult res;
  std::vector<double> logs_r, logs_q;
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be > 0");
    double q = 0.0;
    for (const auto& x : grid.points()) q = std::max(q, detail::ball_integral(m, x, r, 0.0) / std::pow(r, s));
    res.ratios.push_back(q);
    logs_r.push_back(std::log(r));
    logs_q.push_back(std::log(std::max(q, std::numeric_limits<double>::min())));
  }
  const double n = static_cast<double>(radii.size());
  double mr = 0.0, mq = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    mr += logs_r[i] / n;
    mq += logs_q[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    sxy += (logs_r[i] - mr) * (logs_q[i] - mq);
    sxx += (logs_r[i] - mr) * (logs_r[i] - mr);
  }
  res.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const bool bounded = res.slope >= -0.05;
  res.c_prime = bounded ? *std::max_element(res.ratios.begin(), res.ratios.end()) : detail::kInf;
  res.pass = bounded && s > beta;
  return res;
}

}  // namespace traceform::kato
