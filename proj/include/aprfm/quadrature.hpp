#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace aprfm::quadrature {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n in [1, 128].
GaussLegendre gauss_legendre(int n);

/// Normalized velocity rule: weights sum to one so that <1> = 1.
/// 1D: nodes are velocities v in [-1, 1]. 2D: nodes are angles in [0, 2pi].
struct AngularRule {
  int dimension = 1;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

AngularRule angular_rule(int dimension, int n);

double average(const AngularRule& rule, std::span<const double> samples);

/// Scattering kernel k(v, v') over velocity coordinates (v in 1D, angle in 2D).
/// Must be non-negative. Absent means isotropic k = 1.
using Kernel = std::function<double(double v, double v_prime)>;

/// (Lf)(v_q) = sum_q' w_q' k(v_q, v_q') (f_q' - f_q).
std::vector<double> apply_collision(const AngularRule& rule, std::span<const double> f,
                                    const std::optional<Kernel>& kernel = std::nullopt);

}  // namespace aprfm::quadrature
