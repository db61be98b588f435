#pragma once

// Admissible measures with finite support (atoms or concentric spheres) and
// monotone sequences of them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/kernels.hpp"

namespace traceform {

class AtomicMeasure;
class SphereFamilyMeasure;
enum class Direction { Increasing, Decreasing };

/// Finite sum of weighted Dirac masses. Points are distinct, weights > 0.
class AtomicMeasure {
 public:
  static AtomicMeasure create(std::vector<Point> points, std::vector<double> weights) {
    if (points.empty()) throw Error(ErrorKind::EmptyMeasure, "atomic measure needs at least one atom");
    if (points.size() != weights.size()) {
      throw Error(ErrorKind::InvalidArgument, "points and weights differ in length");
    }
    const std::size_t dim = points.front().size();
    if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "points must have dimension >= 1");
    for (const auto& p : points) {
      if (p.size() != dim) throw Error(ErrorKind::DimensionMismatch, "atoms of mixed dimension");
    }
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::NonpositiveWeight, "atom weight " + std::to_string(w));
      }
    }
    std::vector<Point> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::DuplicatePoint, "atoms must be pairwise distinct");
    }
    return AtomicMeasure(static_cast<int>(dim), std::move(points), std::move(weights));
  }

  /// Convenience for measures on the real line.
  static AtomicMeasure on_line(const std::vector<double>& xs, std::vector<double> weights) {
    std::vector<Point> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back({x});
    return create(std::move(pts), std::move(weights));
  }

  static AtomicMeasure zero(int dim) { return AtomicMeasure(dim, {}, {}); }

  int dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const AtomicMeasure&, const AtomicMeasure&) = default;

 private:
  friend AtomicMeasure atomic_difference(const AtomicMeasure&, const AtomicMeasure&, Direction);

  AtomicMeasure(int dim, std::vector<Point> points, std::vector<double> weights)
      : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {}

  int dim_;
  std::vector<Point> points_;
  std::vector<double> weights_;
};

/// Uniform surface measures on concentric spheres about the origin of R^3.
class SphereFamilyMeasure {
 public:
  static SphereFamilyMeasure create(std::vector<double> radii, std::vector<double> masses) {
    if (radii.empty()) throw Error(ErrorKind::EmptyMeasure, "sphere family needs at least one sphere");
    if (radii.size() != masses.size()) {
      throw Error(ErrorKind::InvalidArgument, "radii and masses differ in length");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0)) throw Error(ErrorKind::NonpositiveRadius, "sphere radius must be positive");
      if (i > 0 && !(radii[i] > radii[i - 1])) {
        throw Error(ErrorKind::InvalidArgument, "sphere radii must be strictly increasing");
      }
      if (!(masses[i] > 0.0) || !std::isfinite(masses[i])) {
        throw Error(ErrorKind::NonpositiveWeight, "sphere mass " + std::to_string(masses[i]));
      }
    }
    return SphereFamilyMeasure(std::move(radii), std::move(masses));
  }

  static SphereFamilyMeasure zero() { return SphereFamilyMeasure({}, {}); }

  static constexpr int dimension() noexcept { return 3; }
  std::size_t size() const noexcept { return radii_.size(); }
  bool empty() const noexcept { return radii_.empty(); }
  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  Sphere sphere(std::size_t i) const { return {radii_[i], masses_[i]}; }

  friend bool operator==(const SphereFamilyMeasure&, const SphereFamilyMeasure&) = default;

 private:
  friend SphereFamilyMeasure sphere_difference(const SphereFamilyMeasure&, const SphereFamilyMeasure&,
                                               Direction);

  SphereFamilyMeasure(std::vector<double> radii, std::vector<double> masses)
      : radii_(std::move(radii)), masses_(std::move(masses)) {}

  std::vector<double> radii_;
  std::vector<double> masses_;
};

using Measure = std::variant<AtomicMeasure, SphereFamilyMeasure>;

inline std::size_t support_size(const Measure& m) {
  return std::visit([](const auto& v) { return v.size(); }, m);
}

inline const std::vector<double>& measure_weights(const Measure& m) {
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) return a->weights();
  return std::get<SphereFamilyMeasure>(m).masses();
}

inline double total_mass(const Measure& m) {
  const auto& w = measure_weights(m);
  return std::accumulate(w.begin(), w.end(), 0.0);
}

inline AtomicMeasure atomic_measure_new(std::vector<Point> points, std::vector<double> weights) {
  return AtomicMeasure::create(std::move(points), std::move(weights));
}

/// big - small atomwise, where `small <= big` must hold. Zero differences are dropped.
inline AtomicMeasure atomic_difference(const AtomicMeasure& limit, const AtomicMeasure& term,
                                       Direction direction) {
  if (limit.dimension() != term.dimension() && !limit.empty() && !term.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "measures live in different dimensions");
  }
  const bool inc = direction == Direction::Increasing;
  const AtomicMeasure& big = inc ? limit : term;
  const AtomicMeasure& small = inc ? term : limit;
  std::map<Point, double> excess;
  for (std::size_t i = 0; i < big.size(); ++i) excess.emplace(big.points()[i], big.weights()[i]);
  for (std::size_t i = 0; i < small.size(); ++i) {
    auto it = excess.find(small.points()[i]);
    if (it == excess.end() || small.weights()[i] > it->second) {
      throw Error(ErrorKind::NotDominated, "atom weights are not monotonically ordered");
    }
    it->second -= small.weights()[i];
  }
  std::vector<Point> pts;
  std::vector<double> ws;
  for (std::size_t i = 0; i < big.size(); ++i) {
    const double w = excess.at(big.points()[i]);
    if (w > 0.0) {
      pts.push_back(big.points()[i]);
      ws.push_back(w);
    }
  }
  return AtomicMeasure(std::max(limit.dimension(), term.dimension()), std::move(pts), std::move(ws));
}

inline SphereFamilyMeasure sphere_difference(const SphereFamilyMeasure& limit, const SphereFamilyMeasure& term,
                                             Direction direction) {
  const bool inc = direction == Direction::Increasing;
  const SphereFamilyMeasure& big = inc ? limit : term;
  const SphereFamilyMeasure& small = inc ? term : limit;
  std::vector<double> excess = big.masses();
  for (std::size_t i = 0; i < small.size(); ++i) {
    auto it = std::find(big.radii().begin(), big.radii().end(), small.radii()[i]);
    if (it == big.radii().end()) {
      throw Error(ErrorKind::NotDominated, "sphere family is not monotonically ordered");
    }
    const auto j = static_cast<std::size_t>(it - big.radii().begin());
    if (small.masses()[i] > excess[j]) {
      throw Error(ErrorKind::NotDominated, "sphere masses are not monotonically ordered");
    }
    excess[j] -= small.masses()[i];
  }
  std::vector<double> radii, masses;
  for (std::size_t j = 0; j < big.size(); ++j) {
    if (excess[j] > 0.0) {
      radii.push_back(big.radii()[j]);
      masses.push_back(excess[j]);
    }
  }
  return SphereFamilyMeasure(std::move(radii), std::move(masses));
}

/// nu = |mu_limit - mu_n| for a monotone pair. Throws NotDominated when the
/// pair is not ordered in the stated direction.
inline Measure measure_difference(const Measure& limit, const Measure& term,
                                  Direction direction = Direction::Increasing) {
  if (limit.index() != term.index()) {
    throw Error(ErrorKind::UnsupportedMeasure, "cannot subtract measures of different variants");
  }
  if (const auto* a = std::get_if<AtomicMeasure>(&limit)) {
    return atomic_difference(*a, std::get<AtomicMeasure>(term), direction);
  }
  return sphere_difference(std::get<SphereFamilyMeasure>(limit), std::get<SphereFamilyMeasure>(term), direction);
}

/// Monotone family mu_1..mu_N together with its limit. `labels` carries the
/// index n of each term (e.g. the cutoff of a truncation).
class MeasureSequence {
 public:
  static MeasureSequence create(std::vector<int> labels, std::vector<Measure> terms, Measure limit,
                                Direction direction) {
    if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "sequence needs at least one term");
    if (labels.size() != terms.size()) throw Error(ErrorKind::InvalidArgument, "labels and terms differ in length");
    for (const auto& t : terms) {
      if (t.index() != limit.index()) throw Error(ErrorKind::UnsupportedMeasure, "mixed measure variants");
    }
    // Domination is checked pairwise; measure_difference throws NotDominated.
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
      (void)measure_difference(terms[i + 1], terms[i], direction);
    }
    (void)measure_difference(limit, terms.back(), direction);
    return MeasureSequence(std::move(labels), std::move(terms), std::move(limit), direction);
  }

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<Measure>& terms() const noexcept { return terms_; }
  const Measure& term(std::size_t i) const { return terms_.at(i); }
  const Measure& limit() const noexcept { return limit_; }
  Direction direction() const noexcept { return direction_; }

  /// nu_i = |mu_inf - mu_i|.
  Measure difference(std::size_t i) const { return measure_difference(limit_, terms_.at(i), direction_); }

 private:
  MeasureSequence(std::vector<int> labels, std::vector<Measure> terms, Measure limit, Direction direction)
      : labels_(std::move(labels)), terms_(std::move(terms)), limit_(std::move(limit)), direction_(direction) {}

  std::vector<int> labels_;
  std::vector<Measure> terms_;
  Measure limit_;
  Direction direction_;
};

/// mu_n = sum_{|k| <= n} a_k delta_k on the integers, with the |k| <= n_max
/// truncation standing in for the limit. `weights[k + n_max]` holds a_k.
inline MeasureSequence truncate_sequence(const std::vector<double>& weights, const std::vector<int>& schedule,
                                         int n_max) {
  if (n_max < 0 || weights.size() != static_cast<std::size_t>(2 * n_max + 1)) {
    throw Error(ErrorKind::InvalidArgument, "expected 2*n_max+1 weights indexed -n_max..n_max");
  }
  if (schedule.empty()) throw Error(ErrorKind::InvalidArgument, "empty schedule");
  auto build = [&](int n) {
    std::vector<double> xs, ws;
    for (int k = -n; k <= n; ++k) {
      xs.push_back(static_cast<double>(k));
      ws.push_back(weights[static_cast<std::size_t>(k + n_max)]);
    }
    return AtomicMeasure::on_line(xs, std::move(ws));
  };
  std::vector<Measure> terms;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int n = schedule[i];
    if (n > n_max) {
      throw Error(ErrorKind::CutoffExceedsLimit,
                  "cutoff " + std::to_string(n) + " exceeds n_max " + std::to_string(n_max));
    }
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative cutoff");
    if (i > 0 && n <= schedule[i - 1]) throw Error(ErrorKind::InvalidArgument, "schedule must be increasing");
    terms.emplace_back(build(n));
  }
  return MeasureSequence::create(schedule, std::move(terms), build(n_max), Direction::Increasing);
}

/// a_k = rate^{|k|}.
inline std::vector<double> exponential_weights(double rate, int n_max) {
  if (!(rate > 0.0)) throw Error(ErrorKind::NonpositiveWeight, "rate must be positive");
  std::vector<double> w;
  for (int k = -n_max; k <= n_max; ++k) w.push_back(std::pow(rate, std::abs(k)));
  return w;
}

inline MeasureSequence truncated_exponential(double rate, int n_max, const std::vector<int>& schedule) {
  return truncate_sequence(exponential_weights(rate, n_max), schedule, n_max);
}

/// Decreasing family on the unit ball: the unit sphere (mass = its area, 4 pi)
/// plus volume slices of the shell {1 - 1/n < |x| < 1}. The shell of depth
/// `depth` is cut into `slices` equal slabs, each lumped onto its mid-radius
/// sphere with the slab volume as mass; mu_n keeps the slabs lying inside
/// the shell of depth 1/n. The limit is the bare unit sphere.
inline MeasureSequence thinning_shell_sequence(int slices, const std::vector<int>& schedule, double depth = 0.5) {
  if (slices < 1 || !(depth > 0.0) || !(depth < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "thinning shell needs slices >= 1 and depth in (0,1)");
  }
  const double pi = std::numbers::pi;
  const double h = depth / slices;
  auto build = [&](double shell) {
    std::vector<double> radii, masses;
    // deepest slab first so radii come out increasing
    for (int j = slices; j >= 1; --j) {
      if (j * h > shell * (1.0 + 1e-12)) continue;
      const double outer = 1.0 - (j - 1) * h;
      const double inner = 1.0 - j * h;
      radii.push_back(0.5 * (inner + outer));
      masses.push_back(4.0 * pi / 3.0 * (outer * outer * outer - inner * inner * inner));
    }
    radii.push_back(1.0);
    masses.push_back(4.0 * pi);
    return SphereFamilyMeasure::create(std::move(radii), std::move(masses));
  };
  std::vector<Measure> terms;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int n = schedule[i];
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "shell index must be >= 1");
    if (i > 0 && n <= schedule[i - 1]) throw Error(ErrorKind::InvalidArgument, "schedule must be increasing");
    terms.emplace_back(build(1.0 / n));
  }
  return MeasureSequence::create(schedule, std::move(terms), build(0.0), Direction::Decreasing);
}

}  // namespace traceform
