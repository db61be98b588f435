#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "traceform/potentials.hpp"

namespace tf = traceform;
using std::numbers::pi;

namespace {

const tf::Kernel kExp = tf::Kernel::exponential1d();

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transpose() / n;
}

}  // namespace

TEST(Potentials, ApplyExamples) {
  const tf::Measure d0 = tf::AtomicMeasure::on_line({0.0}, {1.0});
  const std::vector<double> one{1.0};
  EXPECT_NEAR(tf::potential_apply(kExp, d0, one, tf::Point{1.0}), 0.1839397206, 1e-10);
  EXPECT_EQ(tf::potential_apply(kExp, tf::AtomicMeasure::zero(1), {}, tf::Point{0.3}), 0.0);
  const tf::Measure s = tf::SphereFamilyMeasure::create({1.0}, {1.0});
  EXPECT_NEAR(tf::potential_apply(tf::Kernel::newtonian(3), s, one, tf::Point{0, 2, 0}), 1.0 / (8.0 * pi), 1e-16);
  EXPECT_NEAR(tf::potential_apply(tf::Kernel::newtonian(3), s, one, tf::Point{0.1, 0.2, 0}), 1.0 / (4.0 * pi),
              1e-16);
}

// Newton's theorem checked against a Monte Carlo surface average.
TEST(Potentials, SpherePotentialMonteCarlo) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const auto k = tf::Kernel::newtonian(3);
  const tf::Point x{0.0, 0.0, 2.0};
  double acc = 0.0;
  const int samples = 400000;
  for (int i = 0; i < samples; ++i) {
    tf::Point y{g(rng), g(rng), g(rng)};
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    for (auto& c : y) c /= r;
    acc += k(x, y);
  }
  EXPECT_NEAR(acc / samples, 1.0 / (8.0 * pi), 2e-4);
}

TEST(Potentials, OneSup) {
  const tf::Measure d0 = tf::AtomicMeasure::on_line({0.0}, {1.0});
  const auto grid = tf::EvaluationGrid::uniform_line(-2, 2, 0.01).with_support(d0);
  EXPECT_DOUBLE_EQ(tf::potential_one_sup(kExp, d0, grid), 0.5);
  EXPECT_EQ(tf::potential_one_sup(kExp, tf::AtomicMeasure::zero(1), grid), 0.0);
}

// The tail nu_3 of a_k = 2^{-|k|}, |k| <= 40, by brute-force grid search
// with a direct summation independent of the library.
TEST(Potentials, TailSupBruteForce) {
  const auto seq = tf::truncated_exponential(0.5, 40, {3});
  const auto grid = tf::EvaluationGrid::uniform_line(-45, 45, 0.01);
  double brute = 0.0;
  for (const auto& x : grid.points()) {
    double s = 0.0;
    for (int k = -40; k <= 40; ++k) {
      if (std::abs(k) > 3) s += 0.5 * std::exp(-std::abs(x[0] - k)) * std::pow(0.5, std::abs(k));
    }
    brute = std::max(brute, s);
  }
  const double lib = tf::potential_one_sup(kExp, seq.difference(0), grid);
  EXPECT_NEAR(lib, brute, 1e-15);
  EXPECT_NEAR(lib, 0.0383065859174, 1e-12);
}

TEST(Potentials, OperatorMatrix) {
  const tf::Measure two = tf::AtomicMeasure::on_line({0.0, 1.0}, {1.0, 1.0});
  const auto op = tf::operator_matrix(kExp, two);
  EXPECT_DOUBLE_EQ(op.matrix(0, 0), 0.5);
  EXPECT_NEAR(op.matrix(0, 1), 0.1839397206, 1e-10);
  EXPECT_EQ(op.matrix(0, 1), op.matrix(1, 0));
  const auto single = tf::operator_matrix(kExp, tf::AtomicMeasure::on_line({0.0}, {3.0}));
  EXPECT_DOUBLE_EQ(single.matrix(0, 0), 1.5);
  try {
    tf::operator_matrix(tf::Kernel::newtonian(3), tf::atomic_measure_new({{0, 0, 0}}, {1.0}));
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::PolarAtomicSupport);
  }
  EXPECT_THROW(tf::operator_matrix(kExp, tf::SphereFamilyMeasure::create({1.0}, {1.0})), tf::Error);
}

TEST(Potentials, ResolventExamples) {
  const auto op = tf::operator_matrix(kExp, tf::AtomicMeasure::on_line({0.0}, {1.0}));
  Eigen::VectorXd psi(1);
  psi << 1.0;
  EXPECT_DOUBLE_EQ(tf::resolvent_apply(op, 0.0, psi)(0), 0.5);
  EXPECT_NEAR(tf::resolvent_apply(op, 1.0, psi)(0), 1.0 / 3.0, 1e-16);
  EXPECT_NEAR(tf::resolvent_apply(op, 1e3, psi)(0), 0.5 / 501.0, 1e-18);
  EXPECT_THROW(tf::resolvent_apply(op, -1.0, psi), tf::Error);
}

TEST(Potentials, HardyBoundsExamples) {
  const tf::Measure d0 = tf::AtomicMeasure::on_line({0.0}, {1.0});
  const auto grid = tf::EvaluationGrid::uniform_line(-5, 6, 0.01);
  const auto h1 = tf::hardy_constant_bounds(kExp, d0, grid);
  EXPECT_DOUBLE_EQ(h1.lower, 0.5);
  EXPECT_DOUBLE_EQ(h1.upper, 0.5);
  const tf::Measure two = tf::AtomicMeasure::on_line({0.0, 1.0}, {1.0, 1.0});
  const auto h2 = tf::hardy_constant_bounds(kExp, two, grid);
  EXPECT_NEAR(h2.lower, 0.5 * (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(h2.lower, 0.6839397, 1e-7);
  EXPECT_NEAR(h2.upper, 0.5 * (1.0 + std::exp(-1.0)), 1e-15);
  const auto h0 = tf::hardy_constant_bounds(kExp, tf::AtomicMeasure::zero(1), grid);
  EXPECT_EQ(h0.lower, 0.0);
  EXPECT_EQ(h0.upper, 0.0);
}

TEST(PotentialProperties, ResolventIdentityRandomPsd) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 15;
    tf::SymmetricOperator op{random_psd(rng, n), Eigen::VectorXd::Ones(n), tf::AtomicMeasure::zero(1)};
    for (double alpha : {0.01, 0.1, 1.0, 10.0}) {
      const Eigen::MatrixXd r = tf::resolvent_matrix(op, alpha);
      const double res = (op.matrix - r - alpha * r * op.matrix).cwiseAbs().rowwise().sum().maxCoeff();
      EXPECT_LT(res, 1e-12) << "n=" << n << " alpha=" << alpha;
    }
  }
}

TEST(PotentialProperties, HardySandwichAndMonotonicity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.05, 2.0), xs(-10.0, 10.0);
  const auto grid = tf::EvaluationGrid::uniform_line(-15, 15, 0.05);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> pts, ws;
    const int n = 1 + trial % 12;
    for (int i = 0; i < n; ++i) {
      double p = std::round(xs(rng) * 100.0) / 100.0;
      while (std::find(pts.begin(), pts.end(), p) != pts.end()) p += 0.37;
      pts.push_back(p);
      ws.push_back(w(rng));
    }
    const tf::Measure mu = tf::AtomicMeasure::on_line(pts, ws);
    const auto h = tf::hardy_constant_bounds(kExp, mu, grid);
    EXPECT_LE(h.lower, h.upper + 1e-12);
    // adding mass never lowers the potential sup
    auto bigger_w = ws;
    bigger_w[static_cast<std::size_t>(trial) % bigger_w.size()] *= 1.5;
    auto bigger_p = pts;
    bigger_p.push_back(30.0 + trial);
    bigger_w.push_back(w(rng));
    const tf::Measure nu = tf::AtomicMeasure::on_line(bigger_p, bigger_w);
    const auto g2 = grid.with_support(mu).with_support(nu);
    EXPECT_LE(tf::potential_one_sup(kExp, mu, g2), tf::potential_one_sup(kExp, nu, g2));
  }
}

TEST(PotentialProperties, SphereHardySandwich) {
  const auto k = tf::Kernel::newtonian(3);
  const tf::Measure s = tf::SphereFamilyMeasure::create({0.3, 0.8, 1.0, 1.7}, {0.5, 2.0, 4.0 * pi, 1.0});
  const auto h = tf::hardy_constant_bounds(k, s, tf::EvaluationGrid::radial(3.0, 0.01));
  EXPECT_GT(h.lower, 0.0);
  EXPECT_LE(h.lower, h.upper + 1e-12);
}

TEST(PotentialProperties, OperatorDifferenceBound) {
  const auto seq = tf::truncated_exponential(0.5, 12, {0, 2, 4, 6, 8, 10});
  const auto grid = tf::EvaluationGrid::uniform_line(-15, 15, 0.05).with_support(seq.limit());
  const auto& lim = std::get<tf::AtomicMeasure>(seq.limit());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& term = std::get<tf::AtomicMeasure>(seq.term(i));
    const double bound = tf::potential_one_sup(kExp, seq.difference(i), grid);
    for (int t = 0; t < 100; ++t) {
      std::vector<double> uf(lim.size());
      for (auto& v : uf) v = u(rng);
      // restriction of u to the support of mu_n (centered index range)
      const std::size_t off = (lim.size() - term.size()) / 2;
      std::vector<double> un(uf.begin() + static_cast<long>(off), uf.begin() + static_cast<long>(off + term.size()));
      double worst = 0.0;
      for (const auto& x : grid.points()) {
        worst = std::max(worst, std::abs(tf::potential_apply(kExp, seq.limit(), uf, x) -
                                         tf::potential_apply(kExp, seq.term(i), un, x)));
      }
      EXPECT_LE(worst, bound + 1e-12);
    }
  }
}

TEST(Potentials, BoundedResolventMatchesWeightedResolvent) {
  const tf::Measure mu = tf::AtomicMeasure::on_line({-1.0, 0.0, 2.0}, {0.5, 1.0, 0.25});
  const auto op = tf::operator_matrix(kExp, mu);
  const auto& atoms = std::get<tf::AtomicMeasure>(mu);
  const Eigen::MatrixXd b = tf::bounded_resolvent_operator(kExp, mu, 2.0, atoms.points());
  // on the support: W^{-1/2} R W^{1/2} u
  const Eigen::MatrixXd r = tf::resolvent_matrix(op, 2.0);
  const Eigen::MatrixXd expect =
      op.sqrt_weights.cwiseInverse().asDiagonal() * r * op.sqrt_weights.asDiagonal();
  EXPECT_LT((b - expect).cwiseAbs().maxCoeff(), 1e-14);
}
