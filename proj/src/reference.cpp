#include "aprfm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "aprfm/assemble.hpp"
#include "aprfm/error.hpp"

namespace aprfm::reference {

using problems::ProblemSpec;

GridField exact_field(const ProblemSpec& spec, const EvaluationGrid& grid) {
  if (!spec.has_exact()) fail(ErrorKind::unsupported_problem, spec.name + " has no exact solution");
  GridField out{grid, std::vector<double>(grid.size()), false};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    out.values[i] = spec.exact_f(p.x, p.v);
  }
  return out;
}

GridField exact_density(const ProblemSpec& spec, const EvaluationGrid& grid, const quadrature::AngularRule& rule) {
  if (!spec.has_exact()) fail(ErrorKind::unsupported_problem, spec.name + " has no exact solution");
  if (!spec.exact_rho) return density_field(spec.exact_f, rule, grid);
  GridField out{grid, std::vector<double>(grid.spatial.size()), true};
  for (std::size_t i = 0; i < grid.spatial.size(); ++i) out.values[i] = spec.exact_rho(grid.spatial[i]);
  return out;
}

double relative_l2(std::span<const double> approx, std::span<const double> ref) {
  if (approx.size() != ref.size()) fail(ErrorKind::invalid_argument, "fields have different lengths");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = approx[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (!(den > 0.0)) fail(ErrorKind::undefined_metric, "reference field is identically zero");
  return std::sqrt(num / den);
}

double relative_l2(const GridField& approx, const GridField& ref) {
  if (approx.density != ref.density || approx.grid.spatial.size() != ref.grid.spatial.size() ||
      approx.grid.velocities.size() != ref.grid.velocities.size()) {
    fail(ErrorKind::invalid_argument, "fields live on different grids");
  }
  return relative_l2(approx.values, ref.values);
}

GridField density_field(const PhaseSampler& f, const quadrature::AngularRule& rule, const EvaluationGrid& grid) {
  GridField out{grid, std::vector<double>(grid.spatial.size()), true};
  for (std::size_t i = 0; i < grid.spatial.size(); ++i) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(grid.spatial[i], rule.nodes[q]);
    out.values[i] = s;
  }
  return out;
}

GridField density_field(std::span<const double> samples_at_nodes, const quadrature::AngularRule& rule,
                        const EvaluationGrid& grid) {
  const std::size_t nq = rule.size();
  if (samples_at_nodes.size() != grid.spatial.size() * nq) {
    fail(ErrorKind::invalid_argument, "sample count does not match grid and rule");
  }
  GridField out{grid, std::vector<double>(grid.spatial.size()), true};
  for (std::size_t i = 0; i < grid.spatial.size(); ++i) {
    double s = 0.0;
    for (std::size_t q = 0; q < nq; ++q) s += rule.weights[q] * samples_at_nodes[i * nq + q];
    out.values[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

namespace {

struct Mesh {
  int dim = 1;
  int n = 0;  // cells per axis
  Vec2 lo{};
  double h = 0.0;
  std::vector<char> hole;  // per cell
  std::vector<double> eps, sigma_s, sigma_a;

  std::size_t cells() const noexcept { return hole.size(); }
  std::size_t index(int i, int j) const noexcept {
    return dim == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j);
  }
  Vec2 center(int i, int j) const noexcept {
    return {lo[0] + (i + 0.5) * h, dim == 1 ? 0.0 : lo[1] + (j + 0.5) * h};
  }
};

Mesh make_mesh(const ProblemSpec& spec, int n) {
  Mesh m;
  m.dim = spec.spatial_dim;
  m.n = n;
  m.lo = spec.spatial_lo();
  m.h = (spec.spatial_hi()[0] - m.lo[0]) / n;
  const std::size_t cells = m.dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  m.hole.assign(cells, 0);
  m.eps.assign(cells, 0.0);
  m.sigma_s.assign(cells, 0.0);
  m.sigma_a.assign(cells, 0.0);
  const int nj = m.dim == 1 ? 1 : n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nj; ++j) {
      const std::size_t c = m.index(i, j);
      const Vec2 x = m.center(i, j);
      m.hole[c] = spec.in_hole(x) ? 1 : 0;
      m.eps[c] = spec.eps_at(x);
      m.sigma_s[c] = spec.sigma_s(x);
      m.sigma_a[c] = spec.sigma_a(x);
    }
  }
  return m;
}

// One upwind transport sweep along velocity coordinate `v`.
// f = (ax f_upx + ay f_upy + src) / (ax + ay + sigma_s K + eps^2 sigma_a).
// Returns the max change relative to the incoming values of `f`.
double sweep(const ProblemSpec& spec, const Mesh& m, double v, double collision_k, std::span<const double> src,
             std::span<double> f) {
  const Vec2 dir = problems::velocity_direction(m.dim, v);
  const int sx = dir[0] > 0.0 ? 1 : -1;
  const int sy = dir[1] > 0.0 ? 1 : -1;
  const int n = m.n;
  const int nj = m.dim == 1 ? 1 : n;
  double change = 0.0;
  for (int jj = 0; jj < nj; ++jj) {
    const int j = sy > 0 ? jj : nj - 1 - jj;
    for (int ii = 0; ii < n; ++ii) {
      const int i = sx > 0 ? ii : n - 1 - ii;
      const std::size_t c = m.index(i, j);
      if (m.hole[c]) continue;
      const Vec2 xc = m.center(i, j);
      const double ax = m.eps[c] * std::abs(dir[0]) / m.h;
      const double ay = m.dim == 1 ? 0.0 : m.eps[c] * std::abs(dir[1]) / m.h;
      double num = src[c];
      if (ax > 0.0) {
        const int iu = i - sx;
        double up;
        if (iu < 0 || iu >= n || m.hole[m.index(iu, j)]) {
          const double face = m.lo[0] + (sx > 0 ? i : i + 1) * m.h;
          up = spec.boundary_value({face, xc[1]}, v);
        } else {
          up = f[m.index(iu, j)];
        }
        num += ax * up;
      }
      if (ay > 0.0) {
        const int ju = j - sy;
        double up;
        if (ju < 0 || ju >= n || m.hole[m.index(i, ju)]) {
          const double face = m.lo[1] + (sy > 0 ? j : j + 1) * m.h;
          up = spec.boundary_value({xc[0], face}, v);
        } else {
          up = f[m.index(i, ju)];
        }
        num += ay * up;
      }
      const double den = ax + ay + m.sigma_s[c] * collision_k + m.eps[c] * m.eps[c] * m.sigma_a[c];
      if (!(den > 0.0)) fail(ErrorKind::invalid_problem, "transport cell has no coupling (zero denominator)");
      const double updated = num / den;
      change = std::max(change, std::abs(updated - f[c]));
      f[c] = updated;
    }
  }
  return change;
}

// Linear interpolation of a cell-centred field at x, exact at aligned nodes.
double sample(const Mesh& m, std::span<const double> f, const Vec2& x) {
  int base[2] = {0, 0};
  double t[2] = {0.0, 0.0};
  for (int k = 0; k < m.dim; ++k) {
    const double p = (x[k] - m.lo[k]) / m.h - 0.5;
    double r = std::round(p);
    if (std::abs(p - r) < 1e-9) {
      base[k] = std::clamp(static_cast<int>(r), 0, m.n - 1);
      t[k] = 0.0;
    } else {
      base[k] = std::clamp(static_cast<int>(std::floor(p)), 0, m.n - 2);
      t[k] = std::clamp(p - base[k], 0.0, 1.0);
    }
  }
  if (m.dim == 1) {
    const double a = f[m.index(base[0], 0)];
    return t[0] == 0.0 ? a : (1.0 - t[0]) * a + t[0] * f[m.index(base[0] + 1, 0)];
  }
  double s = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double wx = a == 0 ? 1.0 - t[0] : t[0];
      const double wy = b == 0 ? 1.0 - t[1] : t[1];
      if (wx == 0.0 || wy == 0.0) continue;
      s += wx * wy * f[m.index(base[0] + a, base[1] + b)];
    }
  }
  return s;
}

}  // namespace

FdmResult fdm_reference(const ProblemSpec& spec, const FdmOptions& options) {
  const int dim = spec.spatial_dim;
  collocation::SpatialCounts counts = options.eval_counts;
  int n_vel = options.eval_velocities;
  if (counts[0] == 0) counts = dim == 1 ? collocation::SpatialCounts{128, 1} : collocation::SpatialCounts{64, 64};
  if (n_vel == 0) n_vel = dim == 1 ? 256 : 32;
  if (dim == 2 && counts[0] != counts[1]) fail(ErrorKind::invalid_argument, "FDM oracle needs a square evaluation grid");
  const int refine = options.refine == 0 ? (dim == 1 ? 5 : 3) : options.refine;
  if (refine < 1) fail(ErrorKind::invalid_argument, "refine must be positive");
  if (dim == 2 && refine % 2 == 0) fail(ErrorKind::invalid_argument, "2D FDM oracle needs an odd refine factor");
  if (!(options.sweep_tol > 0.0) || options.max_iters < 1) fail(ErrorKind::invalid_argument, "invalid FDM tolerance");
  if (!spec.boundary_value || !spec.rfm_source) fail(ErrorKind::invalid_problem, "problem lacks boundary data or source");

  const EvaluationGrid grid = collocation::evaluation_grid(spec, counts, n_vel);
  const quadrature::AngularRule rule = quadrature::angular_rule(dim, options.ordinates);
  const Mesh mesh = make_mesh(spec, counts[0] * refine);
  if (dim == 2 && spec.geometry == problems::Geometry::annulus) {
    const double p = (problems::kHoleHalfWidth - mesh.lo[0]) / mesh.h;
    if (std::abs(p - std::round(p)) > 1e-9) {
      fail(ErrorKind::invalid_argument, "FDM mesh does not resolve the annulus hole faces");
    }
  }
  const std::size_t cells = mesh.cells();
  const std::size_t nq = rule.size();

  auto kernel_sum = [&](double v, std::vector<double>& k_row) {
    double total = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      const double k = spec.kernel ? (*spec.kernel)(v, rule.nodes[q]) : 1.0;
      if (!(k >= 0.0)) fail(ErrorKind::invalid_kernel, "scattering kernel returned a negative value");
      k_row[q] = rule.weights[q] * k;
      total += k_row[q];
    }
    return total;
  };

  // Per-ordinate fixed data.
  std::vector<std::vector<double>> weights_k(nq, std::vector<double>(nq));
  std::vector<double> total_k(nq);
  std::vector<std::vector<double>> rhs(nq, std::vector<double>(cells, 0.0));
  const int nj = dim == 1 ? 1 : mesh.n;
  for (std::size_t q = 0; q < nq; ++q) {
    total_k[q] = kernel_sum(rule.nodes[q], weights_k[q]);
    for (int i = 0; i < mesh.n; ++i) {
      for (int j = 0; j < nj; ++j) {
        const std::size_t c = mesh.index(i, j);
        if (!mesh.hole[c]) rhs[q][c] = spec.rfm_source(mesh.center(i, j), rule.nodes[q]);
      }
    }
  }

  std::vector<std::vector<double>> f(nq, std::vector<double>(cells, 0.0));
  std::vector<std::vector<double>> src(nq, std::vector<double>(cells, 0.0));
  FdmResult result;
  result.cells_per_axis = mesh.n;
  long iter = 0;
  double change = 0.0;
  while (true) {
    // Lagged collision source from the previous iterate.
    for (std::size_t q = 0; q < nq; ++q) {
      for (std::size_t c = 0; c < cells; ++c) {
        double s = 0.0;
        for (std::size_t p = 0; p < nq; ++p) s += weights_k[q][p] * f[p][c];
        src[q][c] = mesh.sigma_s[c] * s + rhs[q][c];
      }
    }
    change = 0.0;
#pragma omp parallel for schedule(static) reduction(max : change)
    for (long q = 0; q < static_cast<long>(nq); ++q) {
      const auto uq = static_cast<std::size_t>(q);
      change = std::max(change, sweep(spec, mesh, rule.nodes[uq], total_k[uq], src[uq], f[uq]));
    }
    ++iter;
    if (change < options.sweep_tol) break;
    if (iter >= options.max_iters) {
      throw NoConvergence("FDM source iteration did not converge in " + std::to_string(iter) +
                              " iterations (last change " + std::to_string(change) + ")",
                          change, iter);
    }
  }
  result.iterations = iter;
  result.last_change = change;

  // Density on the evaluation grid from the ordinate solution.
  result.rho = GridField{grid, std::vector<double>(grid.spatial.size()), true};
  for (std::size_t i = 0; i < grid.spatial.size(); ++i) {
    double s = 0.0;
    for (std::size_t q = 0; q < nq; ++q) s += rule.weights[q] * sample(mesh, f[q], grid.spatial[i]);
    result.rho.values[i] = s;
  }

  // Evaluation velocities: one sweep each with the converged collision source.
  result.f = GridField{grid, std::vector<double>(grid.size()), false};
  const std::size_t nv = grid.velocities.size();
#pragma omp parallel for schedule(dynamic, 1)
  for (long e = 0; e < static_cast<long>(nv); ++e) {
    const auto ue = static_cast<std::size_t>(e);
    const double v = grid.velocities[ue];
    std::vector<double> k_row(nq);
    const double total = kernel_sum(v, k_row);
    std::vector<double> s(cells, 0.0);
    std::vector<double> fe(cells, 0.0);
    for (int i = 0; i < mesh.n; ++i) {
      for (int j = 0; j < nj; ++j) {
        const std::size_t c = mesh.index(i, j);
        if (mesh.hole[c]) continue;
        double acc = 0.0;
        for (std::size_t p = 0; p < nq; ++p) acc += k_row[p] * f[p][c];
        s[c] = mesh.sigma_s[c] * acc + spec.rfm_source(mesh.center(i, j), v);
      }
    }
    sweep(spec, mesh, v, total, s, fe);
    for (std::size_t i = 0; i < grid.spatial.size(); ++i) {
      result.f.values[i * nv + ue] = sample(mesh, fe, grid.spatial[i]);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fitted approximations

double Approximation::f(const Vec2& x, double v) const {
  const int dim = spec->spatial_dim;
  const auto y = assemble::phase_input(dim, x, v);
  const std::size_t zp = phase_model->num_columns();
  const std::span<const double> all(coeffs.data(), static_cast<std::size_t>(coeffs.size()));
  if (rho_model == nullptr) {
    return basis::model_eval(*phase_model, all, std::span<const double>(y.data(), dim + 1));
  }
  const std::size_t zr = rho_model->num_columns();
  if (all.size() != zr + zp) fail(ErrorKind::invalid_argument, "coefficient length mismatch");
  const double rho = basis::model_eval(*rho_model, all.subspan(0, zr), std::span<const double>(x.data(), dim));
  const double g = basis::model_eval(*phase_model, all.subspan(zr), std::span<const double>(y.data(), dim + 1));
  return rho + spec->eps_at(x) * g;
}

double Approximation::density(const Vec2& x, const quadrature::AngularRule& rule) const {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(x, rule.nodes[q]);
  return s;
}

namespace {

template <class Body>
void for_each_node(std::size_t n, Execution execution, Body&& body) {
  if (execution == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(aprfm_reference_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

GridField evaluate_f(const Approximation& approx, const EvaluationGrid& grid, Execution execution) {
  GridField out{grid, std::vector<double>(grid.size()), false};
  const std::size_t nv = grid.velocities.size();
  for_each_node(grid.spatial.size(), execution, [&](std::size_t i) {
    for (std::size_t k = 0; k < nv; ++k) out.values[i * nv + k] = approx.f(grid.spatial[i], grid.velocities[k]);
  });
  return out;
}

GridField evaluate_density(const Approximation& approx, const EvaluationGrid& grid, const quadrature::AngularRule& rule,
                           Execution execution) {
  GridField out{grid, std::vector<double>(grid.spatial.size()), true};
  for_each_node(grid.spatial.size(), execution,
                [&](std::size_t i) { out.values[i] = approx.density(grid.spatial[i], rule); });
  return out;
}

}  // namespace aprfm::reference
