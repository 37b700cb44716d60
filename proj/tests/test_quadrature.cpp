#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "aprfm/error.hpp"
#include "aprfm/quadrature.hpp"
#include "oracles.hpp"

using namespace aprfm;
using namespace aprfm::quadrature;

TEST(GaussLegendre, TwoPoint) {
  const auto gl = gauss_legendre(2);
  EXPECT_NEAR(gl.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(gl.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(gl.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(gl.weights[1], 1.0, 1e-15);
  double x2 = 0.0;
  for (int q = 0; q < 2; ++q) x2 += gl.weights[q] * gl.nodes[q] * gl.nodes[q];
  EXPECT_NEAR(x2, 2.0 / 3.0, 1e-15);
}

TEST(GaussLegendre, WeightSumAndExactness) {
  for (int n : {2, 4, 8, 16}) {
    const auto gl = gauss_legendre(n);
    EXPECT_NEAR(std::accumulate(gl.weights.begin(), gl.weights.end(), 0.0), 2.0, 1e-14);
    EXPECT_TRUE(std::is_sorted(gl.nodes.begin(), gl.nodes.end()));
  }
  for (int n = 1; n <= 16; ++n) {
    const auto gl = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int q = 0; q < n; ++q) s += gl.weights[q] * std::pow(gl.nodes[q], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussLegendre, Range) {
  EXPECT_THROW(gauss_legendre(0), Error);
  EXPECT_THROW(gauss_legendre(129), Error);
  EXPECT_NO_THROW(gauss_legendre(128));
  EXPECT_THROW(angular_rule(1, 1), Error);
  EXPECT_THROW(angular_rule(3, 4), Error);
}

TEST(AngularRule, Averages) {
  for (int dim : {1, 2}) {
    const auto rule = angular_rule(dim, 16);
    EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 1.0, 1e-15);
    for (double w : rule.weights) EXPECT_GT(w, 0.0);
  }
  const auto r1 = angular_rule(1, 16);
  std::vector<double> v(r1.nodes), v2(r1.size());
  for (std::size_t q = 0; q < r1.size(); ++q) v2[q] = v[q] * v[q];
  EXPECT_NEAR(average(r1, v), 0.0, 1e-15);
  EXPECT_NEAR(average(r1, v2), 1.0 / 3.0, 1e-12);

  const auto r2 = angular_rule(2, 16);
  std::vector<double> c(r2.size()), c2(r2.size()), k(r2.size(), 4.5);
  for (std::size_t q = 0; q < r2.size(); ++q) {
    c[q] = std::cos(r2.nodes[q]);
    c2[q] = c[q] * c[q];
    EXPECT_GE(r2.nodes[q], 0.0);
    EXPECT_LE(r2.nodes[q], 2.0 * std::numbers::pi);
  }
  EXPECT_NEAR(average(r2, c), 0.0, 1e-12);
  EXPECT_NEAR(average(r2, c2), 0.5, 1e-10);
  EXPECT_NEAR(oracle::riemann_angular_average([](double a) { return std::cos(a) * std::cos(a); }, 1000000), 0.5,
              1e-10);
  EXPECT_DOUBLE_EQ(average(r2, k), 4.5);
  EXPECT_THROW(average(r2, std::vector<double>(3, 1.0)), Error);
}

TEST(Collision, BasicCases) {
  const auto rule = angular_rule(1, 16);
  const std::vector<double> constant(rule.size(), 2.5);
  for (double x : apply_collision(rule, constant)) EXPECT_NEAR(x, 0.0, 1e-15);
  const auto lv = apply_collision(rule, rule.nodes);
  for (std::size_t q = 0; q < rule.size(); ++q) EXPECT_NEAR(lv[q], -rule.nodes[q], 1e-15);
  const Kernel negative = [](double, double) { return -1.0; };
  try {
    apply_collision(rule, constant, negative);
    FAIL() << "negative kernel accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_kernel);
  }
  EXPECT_THROW(apply_collision(rule, std::vector<double>(3, 0.0)), Error);
}

TEST(Collision, ConservationSymmetryDissipation) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (int dim : {1, 2}) {
    const auto rule = angular_rule(dim, 16);
    const std::size_t n = rule.size();
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> f(n), g(n);
      for (std::size_t q = 0; q < n; ++q) {
        f[q] = u(rng);
        g[q] = u(rng);
      }
      std::optional<Kernel> kernel;
      if (trial % 2 == 1) {
        // Random symmetric non-negative kernel a + b cos(v - w) / 2 + c (v + w)^2.
        const double a = pos(rng), b = pos(rng) * 0.1, c = pos(rng);
        kernel = [a, b, c](double v, double w) { return a + b * std::cos(v - w) * 0.5 + c * (v + w) * (v + w); };
      }
      const auto lf = apply_collision(rule, f, kernel);
      const auto lg = apply_collision(rule, g, kernel);
      EXPECT_NEAR(average(rule, lf), 0.0, 1e-12);
      double f_lg = 0.0, lf_g = 0.0, f_lf = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        f_lg += rule.weights[q] * f[q] * lg[q];
        lf_g += rule.weights[q] * lf[q] * g[q];
        f_lf += rule.weights[q] * f[q] * lf[q];
      }
      EXPECT_NEAR(f_lg, lf_g, 1e-12);
      EXPECT_LE(f_lf, 1e-12);
    }
  }
}
