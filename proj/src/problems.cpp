#include "aprfm/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <numbers>
#include <string>
#include <vector>

#include "aprfm/error.hpp"

namespace aprfm::problems {

namespace {

double one(const Vec2&) { return 1.0; }
double zero(const Vec2&) { return 0.0; }
double zero_phase(const Vec2&, double) { return 0.0; }

double exp_field(const Vec2& x) { return std::exp(-x[0] - x[1]); }

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorKind::invalid_argument, "epsilon must be finite and non-negative");
  }
}

ProblemSpec slab(ProblemId id, double epsilon) {
  ProblemSpec s;
  s.id = id;
  s.spatial_dim = 1;
  s.geometry = Geometry::interval;
  s.scaling = Scaling::uniform;
  s.epsilon = epsilon;
  s.sigma_s = one;
  s.sigma_a = zero;
  s.macro_source = zero;
  s.micro_source = zero_phase;
  s.rfm_source = zero_phase;
  return s;
}

// eps v . grad f = <f> - f + eps^2 G on a 2D domain, divided by eps: Q = G.
ProblemSpec plane(ProblemId id, double epsilon, Geometry geometry) {
  ProblemSpec s;
  s.id = id;
  s.spatial_dim = 2;
  s.geometry = geometry;
  s.scaling = Scaling::uniform;
  s.epsilon = epsilon;
  s.sigma_s = one;
  s.sigma_a = zero;
  return s;
}

void attach_exponential_solution(ProblemSpec& s) {
  // G = (-cos a - sin a) e^{-x1-x2} / eps has zero mean, so <Q> = 0 and
  // eps (Q - <Q>) = (-cos a - sin a) e^{-x1-x2}.
  const double eps = s.epsilon;
  s.macro_source = zero;
  s.micro_source = [](const Vec2& x, double a) { return (-std::cos(a) - std::sin(a)) * exp_field(x); };
  s.rfm_source = [eps](const Vec2& x, double a) { return eps * (-std::cos(a) - std::sin(a)) * exp_field(x); };
  s.boundary_value = [](const Vec2& x, double) { return exp_field(x); };
  s.exact_f = [](const Vec2& x, double) { return exp_field(x); };
  s.exact_grad_f = [](const Vec2& x, double) {
    const double e = exp_field(x);
    return Vec2{-e, -e};
  };
  s.exact_rho = exp_field;
}

}  // namespace

double ProblemSpec::eps_at(const Vec2& x) const {
  return scaling == Scaling::mixed ? epsilon_field(x) : epsilon;
}

Vec2 ProblemSpec::eps_grad_at(const Vec2& x) const {
  return scaling == Scaling::mixed ? epsilon_grad(x) : Vec2{0.0, 0.0};
}

Vec2 ProblemSpec::spatial_lo() const noexcept {
  return geometry == Geometry::interval ? Vec2{0.0, 0.0} : Vec2{-1.0, -1.0};
}

Vec2 ProblemSpec::spatial_hi() const noexcept {
  return geometry == Geometry::interval ? Vec2{1.0, 0.0} : Vec2{1.0, 1.0};
}

double ProblemSpec::velocity_lo() const noexcept { return spatial_dim == 1 ? -1.0 : 0.0; }
double ProblemSpec::velocity_hi() const noexcept { return spatial_dim == 1 ? 1.0 : 2.0 * std::numbers::pi; }

bool ProblemSpec::in_hole(const Vec2& x) const noexcept {
  return geometry == Geometry::annulus && std::max(std::abs(x[0]), std::abs(x[1])) < kHoleHalfWidth;
}

bool ProblemSpec::in_domain(const Vec2& x) const noexcept {
  const Vec2 lo = spatial_lo();
  const Vec2 hi = spatial_hi();
  for (int k = 0; k < spatial_dim; ++k) {
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  }
  return !in_hole(x);
}

Vec2 velocity_direction(int spatial_dim, double v) noexcept {
  if (spatial_dim == 1) return {v, 0.0};
  return {std::cos(v), std::sin(v)};
}

double epsilon_profile(double x) noexcept {
  return 1e-2 + 0.5 * (std::tanh(6.5 - 11.0 * x) + std::tanh(11.0 * x - 4.5));
}

double epsilon_profile_derivative(double x) noexcept {
  const double a = std::tanh(6.5 - 11.0 * x);
  const double b = std::tanh(11.0 * x - 4.5);
  return 0.5 * (-11.0 * (1.0 - a * a) + 11.0 * (1.0 - b * b));
}

ProblemSpec catalog(ProblemId id, double epsilon) {
  ProblemSpec s;
  switch (id) {
    case ProblemId::ex1: {
      // eps v f_x = <f> - f - eps v, f(0, v>0) = 1, f(1, v<0) = 0; f = 1 - x.
      check_epsilon(epsilon);
      s = slab(id, epsilon);
      s.name = "1D slab with source, exact solution 1 - x";
      s.micro_source = [](const Vec2&, double v) { return -v; };
      s.rfm_source = [epsilon](const Vec2&, double v) { return -epsilon * v; };
      s.boundary_value = [](const Vec2& x, double) { return x[0] < 0.5 ? 1.0 : 0.0; };
      s.exact_f = [](const Vec2& x, double) { return 1.0 - x[0]; };
      s.exact_grad_f = [](const Vec2&, double) { return Vec2{-1.0, 0.0}; };
      s.exact_rho = [](const Vec2& x) { return 1.0 - x[0]; };
      break;
    }
    case ProblemId::ex2: {
      check_epsilon(epsilon);
      s = slab(id, epsilon);
      s.name = "1D slab without source";
      s.boundary_value = [](const Vec2& x, double) { return x[0] < 0.5 ? 1.0 : 0.0; };
      break;
    }
    case ProblemId::ex3: {
      s = slab(id, 0.0);
      s.name = "1D mixed-scale slab, eps(x) profile";
      s.scaling = Scaling::mixed;
      s.epsilon_field = [](const Vec2& x) { return epsilon_profile(x[0]); };
      s.epsilon_grad = [](const Vec2& x) { return Vec2{epsilon_profile_derivative(x[0]), 0.0}; };
      s.boundary_value = [](const Vec2& x, double) { return x[0] < 0.5 ? 0.5 : 0.0; };
      break;
    }
    case ProblemId::ex4: {
      check_epsilon(epsilon);
      s = plane(id, epsilon, Geometry::square);
      s.name = "2D square, exact solution exp(-x1-x2)";
      attach_exponential_solution(s);
      break;
    }
    case ProblemId::ex5: {
      check_epsilon(epsilon);
      s = plane(id, epsilon, Geometry::square);
      s.name = "2D square, constant source, vacuum inflow";
      s.macro_source = [](const Vec2&) { return 0.5; };
      s.micro_source = zero_phase;
      s.rfm_source = [epsilon](const Vec2&, double) { return 0.5 * epsilon * epsilon; };
      s.boundary_value = zero_phase;
      break;
    }
    case ProblemId::ex6: {
      check_epsilon(epsilon);
      s = plane(id, epsilon, Geometry::annulus);
      s.name = "2D annulus [-1,1]^2 minus (-1/3,1/3)^2, exact solution exp(-x1-x2)";
      attach_exponential_solution(s);
      break;
    }
    default:
      fail(ErrorKind::invalid_argument, "unknown problem id");
  }
  return s;
}

ProblemId parse_problem_id(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, ProblemId>, 6> table{{
      {"ex1", ProblemId::ex1}, {"ex2", ProblemId::ex2}, {"ex3", ProblemId::ex3},
      {"ex4", ProblemId::ex4}, {"ex5", ProblemId::ex5}, {"ex6", ProblemId::ex6},
  }};
  for (const auto& [name, id] : table) {
    if (name == text) return id;
  }
  fail(ErrorKind::invalid_argument, "unknown problem id '" + std::string(text) + "'");
}

std::string_view to_string(ProblemId id) noexcept {
  switch (id) {
    case ProblemId::ex1: return "ex1";
    case ProblemId::ex2: return "ex2";
    case ProblemId::ex3: return "ex3";
    case ProblemId::ex4: return "ex4";
    case ProblemId::ex5: return "ex5";
    case ProblemId::ex6: return "ex6";
  }
  return "?";
}

Residuals micro_macro_residuals(const ProblemSpec& spec, const quadrature::AngularRule& rule,
                                const RhoFn& rho, const GFn& g, const Vec2& x, double v) {
  const int dim = spec.spatial_dim;
  const auto dot = [dim](const Vec2& a, const Vec2& b) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += a[k] * b[k];
    return s;
  };
  const FieldSample r = rho(x);
  const FieldSample gv = g(x, v);
  const Vec2 dir = velocity_direction(dim, v);
  const double eps = spec.eps_at(x);
  const Vec2 deps = spec.eps_grad_at(x);
  const double sigma_s = spec.sigma_s(x);
  const double sigma_a = spec.sigma_a(x);

  std::vector<double> gq(rule.size());
  double avg_transport = 0.0;  // <v . grad g>, or <v . grad (eps g)> when mixed
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const FieldSample s = g(x, rule.nodes[q]);
    const Vec2 dq = velocity_direction(dim, rule.nodes[q]);
    gq[q] = s.value;
    double t = dot(dq, s.grad);
    if (spec.scaling == Scaling::mixed) t = eps * t + s.value * dot(dq, deps);
    avg_transport += rule.weights[q] * t;
  }

  Residuals out;
  out.macro = avg_transport + sigma_a * r.value - spec.macro_source(x);

  double transport = dot(dir, gv.grad);
  if (spec.scaling == Scaling::mixed) {
    transport = eps * transport + gv.value * dot(dir, deps);
    out.micro = dot(dir, r.grad) + (transport - avg_transport) + sigma_s * gv.value - spec.micro_source(x, v);
    return out;
  }

  double collision = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double k = spec.kernel ? (*spec.kernel)(v, rule.nodes[q]) : 1.0;
    collision += rule.weights[q] * k * (gq[q] - gv.value);
  }
  out.micro = dot(dir, r.grad) + eps * (transport - avg_transport) - sigma_s * collision +
              eps * eps * sigma_a * gv.value - spec.micro_source(x, v);
  return out;
}

}  // namespace aprfm::problems
