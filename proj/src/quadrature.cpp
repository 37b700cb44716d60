#include "aprfm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "aprfm/error.hpp"

namespace aprfm::quadrature {

GaussLegendre gauss_legendre(int n) {
  if (n < 1 || n > 128) fail(ErrorKind::invalid_argument, "Gauss-Legendre order must lie in [1, 128], got " + std::to_string(n));
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess; roots are
  // symmetric so only the upper half is computed.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

AngularRule angular_rule(int dimension, int n) {
  if (dimension != 1 && dimension != 2) fail(ErrorKind::invalid_argument, "angular rule dimension must be 1 or 2");
  if (n < 2) fail(ErrorKind::invalid_argument, "angular rule needs at least two nodes");
  const GaussLegendre gl = gauss_legendre(n);
  AngularRule rule;
  rule.dimension = dimension;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int q = 0; q < n; ++q) {
    if (dimension == 1) {
      rule.nodes[q] = gl.nodes[q];
    } else {
      rule.nodes[q] = std::numbers::pi * (gl.nodes[q] + 1.0);
    }
    // 1D: (1/2) int_{-1}^{1}; 2D: (1/2pi) int_0^{2pi} with d(alpha) = pi dx.
    rule.weights[q] = 0.5 * gl.weights[q];
  }
  return rule;
}

double average(const AngularRule& rule, std::span<const double> samples) {
  if (samples.size() != rule.size()) fail(ErrorKind::invalid_argument, "sample count does not match the rule");
  double s = 0.0;
  for (std::size_t q = 0; q < samples.size(); ++q) s += rule.weights[q] * samples[q];
  return s;
}

std::vector<double> apply_collision(const AngularRule& rule, std::span<const double> f,
                                    const std::optional<Kernel>& kernel) {
  if (f.size() != rule.size()) fail(ErrorKind::invalid_argument, "sample count does not match the rule");
  const std::size_t n = rule.size();
  std::vector<double> out(n);
  if (!kernel) {
    const double avg = average(rule, f);
    for (std::size_t q = 0; q < n; ++q) out[q] = avg - f[q];
    return out;
  }
  for (std::size_t q = 0; q < n; ++q) {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double k = (*kernel)(rule.nodes[q], rule.nodes[p]);
      if (!(k >= 0.0)) fail(ErrorKind::invalid_kernel, "scattering kernel returned a negative or non-finite value");
      s += rule.weights[p] * k * (f[p] - f[q]);
    }
    out[q] = s;
  }
  return out;
}

}  // namespace aprfm::quadrature
