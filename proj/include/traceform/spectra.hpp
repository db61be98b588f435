#pragma once

// Spectra of K^mu (lambda, descending) and of the trace form (E = 1/lambda,
// ascending), eigenfunction extension, eigenvalue counting and the
// convergence experiment over a monotone measure sequence.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/kernels.hpp"
#include "traceform/measures.hpp"
#include "traceform/parallel.hpp"
#include "traceform/potentials.hpp"

namespace traceform {

struct MultiplicityGroup {
  std::size_t first = 0;  ///< index into lambdas
  std::size_t count = 0;
  double lambda = 0.0;  ///< mean of the clustered eigenvalues
};

struct SpectralResult {
  std::vector<double> lambdas;   ///< descending
  std::vector<double> energies;  ///< ascending, energies[k] = 1 / lambdas[k]
  Eigen::MatrixXd eigenvectors;  ///< column k pairs with lambdas[k], weighted coordinates
  double multiplicity_tol = 1e-8;
  std::vector<MultiplicityGroup> groups;

  std::size_t size() const noexcept { return lambdas.size(); }
};

/// Consecutive eigenvalues closer than tol * max(|a|, |b|) share a group.
inline std::vector<MultiplicityGroup> cluster_eigenvalues(const std::vector<double>& lambdas, double tol) {
  std::vector<MultiplicityGroup> groups;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!groups.empty()) {
      const double prev = lambdas[i - 1];
      if (std::abs(prev - lambdas[i]) <= tol * std::max(std::abs(prev), std::abs(lambdas[i]))) {
        auto& g = groups.back();
        g.lambda = (g.lambda * static_cast<double>(g.count) + lambdas[i]) / static_cast<double>(g.count + 1);
        ++g.count;
        continue;
      }
    }
    groups.push_back({i, 1, lambdas[i]});
  }
  return groups;
}

inline SpectralResult eigendecompose(const SymmetricOperator& op, double multiplicity_tol = 1e-8) {
  if (!(multiplicity_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "multiplicity_tol must be > 0");
  SpectralResult out;
  out.multiplicity_tol = multiplicity_tol;
  const auto n = op.size();
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver did not converge");
  // Eigen returns ascending order
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;
    const double lambda = es.eigenvalues()(src);
    if (!(lambda > 0.0)) {
      throw Error(ErrorKind::NonpositiveEigenvalue,
                  "eigenvalue " + std::to_string(lambda) + " of a potential operator must be positive");
    }
    out.lambdas.push_back(lambda);
    out.energies.push_back(1.0 / lambda);
    out.eigenvectors.col(k) = es.eigenvectors().col(src);
  }
  out.groups = cluster_eigenvalues(out.lambdas, multiplicity_tol);
  return out;
}

/// Eigenvector k of `result` expressed as a function on the support (v / sqrt(w)).
inline std::vector<double> eigenfunction_on_support(const SpectralResult& result, const SymmetricOperator& op,
                                                    std::size_t k) {
  std::vector<double> u(static_cast<std::size_t>(op.size()));
  for (Eigen::Index j = 0; j < op.size(); ++j) {
    u[static_cast<std::size_t>(j)] = result.eigenvectors(j, static_cast<Eigen::Index>(k)) / op.sqrt_weights(j);
  }
  return u;
}

/// Continuous representative (1/lambda) G^mu u of an eigenfunction u given on the support.
inline double eigenfunction_extend(const Kernel& k, const Measure& m, double lambda, std::span<const double> u,
                                   std::span<const double> x) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::NonpositiveEigenvalue, "extension needs lambda > 0");
  return potential_apply(k, m, u, x) / lambda;
}

/// Number of energies in (a, b) with multiplicity: the rank of the spectral
/// projection of the interval.
inline int count_spectrum_in(const SpectralResult& result, double a, double b) {
  if (!(a > 0.0) || !(b > a)) throw Error(ErrorKind::InvalidArgument, "need 0 < a < b");
  int count = 0;
  for (double e : result.energies) {
    for (double edge : {a, b}) {
      if (std::abs(e - edge) <= result.multiplicity_tol * e) {
        throw Error(ErrorKind::BoundaryHitsEigenvalue,
                    "interval endpoint " + std::to_string(edge) + " is an eigenvalue");
      }
    }
    if (e > a && e < b) ++count;
  }
  return count;
}

struct IndexedEigenvalue {
  std::size_t index = 0;
  double lambda = 0.0;
};

/// Eigenvalues of `result` inside the open disc of `radius` about lambda_inf.
inline std::vector<IndexedEigenvalue> lambda_group(const SpectralResult& result, double lambda_inf, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
  std::vector<IndexedEigenvalue> out;
  for (std::size_t i = 0; i < result.lambdas.size(); ++i) {
    if (std::abs(result.lambdas[i] - lambda_inf) < radius) out.push_back({i, result.lambdas[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence experiment

struct ConvergenceOptions {
  double multiplicity_tol = 1e-8;
  double convergence_tol = 1e-6;  ///< relative energy gap required at the last term
  unsigned threads = 1;
  /// Energy intervals (a, b) whose eigenvalue counts are tracked across n.
  std::vector<std::pair<double, double>> count_intervals;
  /// Rounding slack for monotonicity verdicts, in units of machine epsilon times the value scale.
  double rounding_ulps = 64.0;
};

struct ConvergenceRow {
  int n = 0;
  int k = 0;
  double energy = 0.0;        ///< E_n^(k)
  double energy_limit = 0.0;  ///< E_inf^(k)
  double bound = 0.0;         ///< ||G^{nu_n} 1||_inf
  double gap = 0.0;           ///< |1/E_inf^(k) - 1/E_n^(k)|
  double energy_gap = 0.0;    ///< |E_n^(k) - E_inf^(k)|
  double ratio = 0.0;         ///< gap / bound, 0 when both vanish
};

struct TermSummary {
  int n = 0;
  std::size_t support = 0;
  double bound = 0.0;
  double ground_energy = 0.0;
  double operator_norm = 0.0;       ///< largest singular value of S_n (independent of the eigensolver)
  double identity_residual = 0.0;   ///< |(E_n^0 - E_inf^0) - (1/||S_n|| - 1/||S_inf||)|
  std::vector<int> interval_counts;
};

struct ConvergenceSummary {
  double empirical_c = 0.0;
  std::vector<bool> converged;     ///< per k
  std::vector<bool> gap_monotone;  ///< per k, gaps nonincreasing in n up to rounding
  bool ground_monotone = true;     ///< E_n^0 monotone in the sequence direction up to rounding
  bool ground_strict = true;       ///< strictly monotone between distinct terms
  double identity_max_residual = 0.0;
  std::vector<int> limit_counts;
  std::vector<std::optional<int>> stable_from;  ///< per interval, first n with counts equal to the limit from then on
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<TermSummary> terms;
  std::vector<double> limit_energies;
  double limit_operator_norm = 0.0;
  Direction direction = Direction::Increasing;
  int k_max = 0;
  ConvergenceSummary summary;
};

namespace detail {

inline double largest_singular_value(const Eigen::MatrixXd& s) {
  if (s.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
  return svd.singularValues()(0);
}

}  // namespace detail

inline ConvergenceReport convergence_experiment(const Kernel& kernel, const MeasureSequence& seq, int k_max,
                                                const EvaluationGrid& grid, const ConvergenceOptions& opt = {}) {
  if (k_max < 0) throw Error(ErrorKind::InvalidArgument, "k_max must be >= 0");
  const std::size_t limit_size = support_size(seq.limit());
  if (static_cast<std::size_t>(k_max) >= limit_size) {
    throw Error(ErrorKind::ShrinkingSupport, "k_max " + std::to_string(k_max) + " needs more than " +
                                                 std::to_string(limit_size) + " limit eigenvalues");
  }
  const auto limit_op = operator_matrix(kernel, seq.limit());
  const auto limit_spec = eigendecompose(limit_op, opt.multiplicity_tol);

  ConvergenceReport report;
  report.direction = seq.direction();
  report.k_max = k_max;
  report.limit_energies = limit_spec.energies;
  report.limit_operator_norm = detail::largest_singular_value(limit_op.matrix);

  const EvaluationGrid full_grid = grid.with_support(seq.limit());
  const std::size_t nt = seq.size();
  std::vector<SpectralResult> spectra(nt);
  std::vector<TermSummary> terms(nt);
  parallel_for(nt, opt.threads, [&](std::size_t i) {
    const auto op = operator_matrix(kernel, seq.term(i));
    spectra[i] = eigendecompose(op, opt.multiplicity_tol);
    TermSummary& t = terms[i];
    t.n = seq.labels()[i];
    t.support = support_size(seq.term(i));
    t.bound = potential_one_sup(kernel, seq.difference(i), full_grid.with_support(seq.term(i)));
    t.ground_energy = spectra[i].energies.front();
    t.operator_norm = detail::largest_singular_value(op.matrix);
    t.identity_residual = std::abs((t.ground_energy - limit_spec.energies.front()) -
                                   (1.0 / t.operator_norm - 1.0 / report.limit_operator_norm));
    for (const auto& [a, b] : opt.count_intervals) t.interval_counts.push_back(count_spectrum_in(spectra[i], a, b));
  });

  for (std::size_t i = 0; i < nt; ++i) {
    const auto& sp = spectra[i];
    const int kk = std::min<int>(k_max, static_cast<int>(sp.size()) - 1);
    for (int k = 0; k <= kk; ++k) {
      ConvergenceRow r;
      r.n = terms[i].n;
      r.k = k;
      r.energy = sp.energies[static_cast<std::size_t>(k)];
      r.energy_limit = limit_spec.energies[static_cast<std::size_t>(k)];
      r.bound = terms[i].bound;
      r.gap = std::abs(limit_spec.lambdas[static_cast<std::size_t>(k)] - sp.lambdas[static_cast<std::size_t>(k)]);
      r.energy_gap = std::abs(r.energy - r.energy_limit);
      r.ratio = r.bound > 0.0 ? r.gap / r.bound : (r.gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      report.rows.push_back(r);
    }
  }
  report.terms = std::move(terms);

  // summary verdicts
  auto& s = report.summary;
  const double eps = std::numeric_limits<double>::epsilon() * opt.rounding_ulps;
  s.converged.assign(static_cast<std::size_t>(k_max) + 1, false);
  s.gap_monotone.assign(static_cast<std::size_t>(k_max) + 1, true);
  for (const auto& r : report.rows) s.empirical_c = std::max(s.empirical_c, r.ratio);
  for (int k = 0; k <= k_max; ++k) {
    std::optional<double> prev;
    double last_gap = std::numeric_limits<double>::infinity();
    const double e_inf = limit_spec.energies[static_cast<std::size_t>(k)];
    for (const auto& r : report.rows) {
      if (r.k != k) continue;
      if (prev && r.energy_gap > *prev + eps * e_inf) s.gap_monotone[static_cast<std::size_t>(k)] = false;
      prev = r.energy_gap;
      last_gap = r.energy_gap;
    }
    s.converged[static_cast<std::size_t>(k)] = last_gap <= opt.convergence_tol * e_inf;
  }
  const bool increasing = seq.direction() == Direction::Increasing;
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    const double a = report.terms[i].ground_energy;
    const double b = report.terms[i + 1].ground_energy;
    const double step = increasing ? a - b : b - a;  // expected >= 0
    if (step < -eps * a) s.ground_monotone = false;
    if (!(seq.term(i) == seq.term(i + 1)) && !(step > 0.0)) s.ground_strict = false;
  }
  for (const auto& t : report.terms) s.identity_max_residual = std::max(s.identity_max_residual, t.identity_residual);

  for (std::size_t j = 0; j < opt.count_intervals.size(); ++j) {
    const auto [a, b] = opt.count_intervals[j];
    const int target = count_spectrum_in(limit_spec, a, b);
    s.limit_counts.push_back(target);
    std::optional<int> from;
    for (std::size_t i = nt; i-- > 0;) {
      if (report.terms[i].interval_counts[j] != target) break;
      from = report.terms[i].n;
    }
    s.stable_from.push_back(from);
  }
  return report;
}

}  // namespace traceform
