#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "traceform/kernels.hpp"

namespace tf = traceform;
using std::numbers::pi;

namespace {

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

tf::Point random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  tf::Point p{g(rng), g(rng), g(rng)};
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  for (double& c : p) c /= r;
  return p;
}

}  // namespace

TEST(Kernels, ExponentialValues) {
  const auto k = tf::Kernel::exponential1d();
  EXPECT_DOUBLE_EQ(k(tf::Point{0.0}, tf::Point{0.0}), 0.5);
  EXPECT_NEAR(k(tf::Point{0.0}, tf::Point{1.0}), 0.1839397206, 1e-10);
  EXPECT_NEAR(tf::kernel_eval(k, tf::Point{3.0}, tf::Point{-1.5}), 0.5 * std::exp(-4.5), 1e-16);
}

TEST(Kernels, NewtonianAtDistanceTwo) {
  const auto k = tf::Kernel::newtonian(3);
  EXPECT_NEAR(k(tf::Point{0, 0, 0}, tf::Point{0, 2, 0}), 1.0 / (8.0 * pi), 1e-15);
  EXPECT_NEAR(1.0 / (8.0 * pi), 0.0397887358, 1e-10);
}

// c_d is fixed by -Delta G = delta: pairing G with -Delta phi for a Gaussian
// phi = exp(-r^2) must return phi(0) = 1.
TEST(Kernels, NewtonianNormalizationFromLaplacianPairing) {
  for (int d : {3, 4, 5, 7}) {
    const auto k = tf::Kernel::newtonian(d);
    auto integrand = [&](double r) {
      if (r == 0.0) return 0.0;
      const double minus_lap = (2.0 * d - 4.0 * r * r) * std::exp(-r * r);
      return k.at_distance(r) * minus_lap * sphere_area(d) * std::pow(r, d - 1);
    };
    EXPECT_NEAR(simpson(integrand, 0.0, 12.0, 20000), 1.0, 1e-9) << "d=" << d;
  }
}

// kappa from the Fourier pairing of |x|^{alpha-d} with a Gaussian:
// int G phi dx = (2 pi)^{-d/2} int |xi|^{-alpha} exp(-|xi|^2/2) dxi.
TEST(Kernels, RieszNormalizationFromFourierPairing) {
  for (auto [d, alpha] : std::vector<std::pair<int, double>>{{1, 0.5}, {1, 0.75}, {3, 1.5}, {2, 1.0}}) {
    const auto k = tf::Kernel::riesz(d, alpha);
    // r = t^{1/alpha} makes the radial integrand smooth at the origin
    const double q = 1.0 / alpha;
    auto lhs_f = [&](double t) {
      if (t == 0.0) return q * k.at_distance(1.0) * sphere_area(d);
      const double r = std::pow(t, q);
      return k.at_distance(r) * std::exp(-0.5 * r * r) * sphere_area(d) * std::pow(r, d - 1) * q * std::pow(t, q - 1.0);
    };
    const double lhs = simpson(lhs_f, 0.0, std::pow(12.0, alpha), 40000);
    // radial Gaussian moment: int_0^inf r^{s-1} e^{-r^2/2} dr = 2^{s/2-1} Gamma(s/2)
    const double s = d - alpha;
    const double rhs = std::pow(2.0 * pi, -0.5 * d) * sphere_area(d) * std::pow(2.0, 0.5 * s - 1.0) * std::tgamma(0.5 * s);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << "d=" << d << " alpha=" << alpha;
  }
}

TEST(Kernels, SingularityParams) {
  const auto e = tf::kernel_singularity_params(tf::Kernel::exponential1d());
  EXPECT_EQ(e.beta, 0.0);
  EXPECT_EQ(e.c_bound, 0.5);
  EXPECT_TRUE(std::isinf(e.r0));
  const auto n = tf::kernel_singularity_params(tf::Kernel::newtonian(3));
  EXPECT_EQ(n.beta, 1.0);
  EXPECT_NEAR(n.c_bound, 1.0 / (4.0 * pi), 1e-16);
  EXPECT_TRUE(std::isinf(n.r0));
  const auto r = tf::kernel_singularity_params(tf::Kernel::riesz(1, 0.5));
  EXPECT_EQ(r.beta, 0.5);
  EXPECT_GT(r.c_bound, 0.0);
  EXPECT_EQ(tf::Kernel::newtonian(5).beta(), 3.0);
}

TEST(Kernels, Errors) {
  const auto n = tf::Kernel::newtonian(3);
  try {
    n(tf::Point{1, 2, 3}, tf::Point{1, 2, 3});
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::CoincidentPoints);
  }
  try {
    n(tf::Point{1, 2}, tf::Point{1, 2, 3});
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::DimensionMismatch);
  }
  EXPECT_THROW(tf::Kernel::newtonian(2), tf::Error);
  EXPECT_THROW(tf::Kernel::riesz(1, 1.0), tf::Error);
  EXPECT_THROW(tf::Kernel::riesz(3, 2.0), tf::Error);
  EXPECT_THROW(tf::Kernel::riesz(2, 0.0), tf::Error);
}

TEST(KernelProperties, SymmetryAndSingularityBound) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::vector<tf::Kernel> kernels = {tf::Kernel::exponential1d(), tf::Kernel::newtonian(3),
                                           tf::Kernel::newtonian(4), tf::Kernel::riesz(1, 0.5),
                                           tf::Kernel::riesz(2, 1.3), tf::Kernel::riesz(3, 0.7)};
  for (const auto& k : kernels) {
    const auto p = k.singularity_params();
    for (int i = 0; i < 1000; ++i) {
      tf::Point x(static_cast<std::size_t>(k.dimension())), y(x.size());
      for (auto& c : x) c = u(rng);
      for (auto& c : y) c = u(rng);
      const double gxy = k(x, y);
      EXPECT_EQ(gxy, k(y, x));
      EXPECT_GT(gxy, 0.0);
      const double rho = tf::distance(x, y);
      if (rho < p.r0) {
        EXPECT_LE(gxy, p.c_bound * std::pow(rho, -p.beta) * (1.0 + 1e-12)) << k.name();
      }
    }
  }
}

TEST(Spheres, MutualPotentialValues) {
  EXPECT_NEAR(tf::mutual_potential_sphere({1, 1}, {1, 1}), 0.0795774715, 1e-10);
  EXPECT_NEAR(tf::mutual_potential_sphere({1, 1}, {2, 1}), 0.0397887358, 1e-10);
  EXPECT_EQ(tf::mutual_potential_sphere({1, 0}, {3, 2}), 0.0);
  try {
    tf::mutual_potential_sphere({0, 1}, {1, 1});
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::NonpositiveRadius);
  }
}

// Monte Carlo double surface integral of the Newtonian kernel over two
// uniformly sampled concentric spheres.
TEST(Spheres, MutualPotentialMonteCarlo) {
  std::mt19937_64 rng(7);
  const auto k = tf::Kernel::newtonian(3);
  for (auto [r1, r2] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {1.0, 2.0}}) {
    const int samples = 400000;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
      auto x = random_unit_vector(rng), y = random_unit_vector(rng);
      for (auto& c : x) c *= r1;
      for (auto& c : y) c *= r2;
      acc += k(x, y);
    }
    const double mc = acc / samples;
    EXPECT_NEAR(mc / tf::mutual_potential_sphere({r1, 1}, {r2, 1}), 1.0, 1e-2) << r1 << "," << r2;
  }
}

TEST(SphereProperties, SymmetryAndMassHomogeneity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const tf::Sphere a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double v = tf::mutual_potential_sphere(a, b);
    EXPECT_EQ(v, tf::mutual_potential_sphere(b, a));
    const double t = u(rng);
    EXPECT_NEAR(tf::mutual_potential_sphere({a.radius, t * a.mass}, b), t * v, 1e-14 * t * v);
    EXPECT_NEAR(tf::mutual_potential_sphere(a, {b.radius, t * b.mass}), t * v, 1e-14 * t * v);
  }
}
