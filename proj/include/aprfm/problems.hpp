#pragma once

// Benchmark radiative transfer problems in micro-macro-ready form.
//
// Convention: v . grad f = (sigma_s / eps) L f - eps sigma_a f + eps Q on the
// spatial domain, with inflow data on Gamma_-. Sources are stored as
//   macro_source = <Q>,  micro_source = eps (Q - <Q>),  rfm_source = eps^2 Q,
// so that every stored function stays O(1) as eps -> 0.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "aprfm/quadrature.hpp"

namespace aprfm::problems {

using Vec2 = std::array<double, 2>;

enum class ProblemId { ex1, ex2, ex3, ex4, ex5, ex6 };
enum class Geometry { interval, square, annulus };

/// `uniform`: constant eps, f = rho + eps g.
/// `mixed`: eps(x) varies in space, f = rho + eps(x) g and the micro equation
/// carries + sigma_s g in place of - sigma_s L g.
enum class Scaling { uniform, mixed };

using SpatialFn = std::function<double(const Vec2&)>;
using SpatialGradFn = std::function<Vec2(const Vec2&)>;
using PhaseFn = std::function<double(const Vec2&, double)>;
using PhaseGradFn = std::function<Vec2(const Vec2&, double)>;

struct ProblemSpec {
  ProblemId id = ProblemId::ex1;
  std::string name;
  int spatial_dim = 1;
  Geometry geometry = Geometry::interval;
  Scaling scaling = Scaling::uniform;

  double epsilon = 1.0;  // used when scaling == uniform
  SpatialFn epsilon_field;
  SpatialGradFn epsilon_grad;

  SpatialFn sigma_s;
  SpatialFn sigma_a;
  SpatialFn macro_source;
  PhaseFn micro_source;
  PhaseFn rfm_source;
  PhaseFn boundary_value;

  PhaseFn exact_f;
  PhaseGradFn exact_grad_f;  // spatial gradient of exact_f
  SpatialFn exact_rho;

  std::optional<quadrature::Kernel> kernel;

  double eps_at(const Vec2& x) const;
  Vec2 eps_grad_at(const Vec2& x) const;
  bool has_exact() const noexcept { return static_cast<bool>(exact_f); }

  Vec2 spatial_lo() const noexcept;
  Vec2 spatial_hi() const noexcept;
  double velocity_lo() const noexcept;
  double velocity_hi() const noexcept;

  /// Closed outer box minus the open annulus hole.
  bool in_domain(const Vec2& x) const noexcept;
  /// Strictly inside the open annulus hole (-1/3, 1/3)^2.
  bool in_hole(const Vec2& x) const noexcept;
};

inline constexpr double kHoleHalfWidth = 1.0 / 3.0;

/// Direction vector for a velocity coordinate: (v, 0) in 1D, (cos a, sin a) in 2D.
Vec2 velocity_direction(int spatial_dim, double v) noexcept;

ProblemSpec catalog(ProblemId id, double epsilon);
ProblemId parse_problem_id(std::string_view text);
std::string_view to_string(ProblemId id) noexcept;

/// eps(x) = 1e-2 + (tanh(6.5 - 11x) + tanh(11x - 4.5)) / 2.
double epsilon_profile(double x) noexcept;
double epsilon_profile_derivative(double x) noexcept;

struct FieldSample {
  double value = 0.0;
  Vec2 grad{};  // spatial gradient
};

using RhoFn = std::function<FieldSample(const Vec2&)>;
using GFn = std::function<FieldSample(const Vec2&, double)>;

struct Residuals {
  double macro = 0.0;
  double micro = 0.0;
};

/// Pointwise residuals of the macro and micro equations for given (rho, g).
/// Velocity averages are taken with `rule` at fixed x.
Residuals micro_macro_residuals(const ProblemSpec& spec, const quadrature::AngularRule& rule,
                                const RhoFn& rho, const GFn& g, const Vec2& x, double v);

}  // namespace aprfm::problems
