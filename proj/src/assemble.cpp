#include "aprfm/assemble.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "aprfm/error.hpp"

namespace aprfm::assemble {

using collocation::PhasePoint;
using problems::ProblemSpec;
using problems::Scaling;
using problems::Vec2;

namespace {

// Starts of runs of identical x (x-major grids give one run per spatial node),
// followed by a sentinel equal to points.size().
std::vector<std::size_t> group_by_x(const std::vector<PhasePoint>& points) {
  std::vector<std::size_t> starts;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k == 0 || points[k].x != points[k - 1].x) starts.push_back(k);
  }
  starts.push_back(points.size());
  return starts;
}

template <class Body>
void for_each_index(std::size_t n, Execution execution, Body&& body) {
  if (execution == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(aprfm_assemble_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

double dot(int dim, const Vec2& a, const Vec2& b) noexcept {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

double kernel_value(const ProblemSpec& spec, double v, double v_prime) {
  const double k = (*spec.kernel)(v, v_prime);
  if (!(k >= 0.0)) fail(ErrorKind::invalid_kernel, "scattering kernel returned a negative or non-finite value");
  return k;
}

// Phase-space feature values at the rule nodes for a fixed x, plus their
// weighted averages. `transport` holds <v . grad u>, or <v . grad (eps u)>
// for mixed-scale problems.
struct QuadratureCache {
  std::vector<double> value;  // Nq x Z
  std::vector<double> avg_value;
  std::vector<double> avg_directional;
  std::vector<double> avg_transport;

  void build(const ProblemSpec& spec, const basis::FeatureModel& model, const quadrature::AngularRule& rule,
             const Vec2& x) {
    const int dim = spec.spatial_dim;
    const std::size_t z = model.num_columns();
    const std::size_t nq = rule.size();
    value.assign(nq * z, 0.0);
    avg_value.assign(z, 0.0);
    avg_directional.assign(z, 0.0);
    avg_transport.assign(z, 0.0);
    std::vector<double> dd(z);
    const bool mixed = spec.scaling == Scaling::mixed;
    const double eps = spec.eps_at(x);
    const Vec2 deps = spec.eps_grad_at(x);
    for (std::size_t q = 0; q < nq; ++q) {
      const double a = rule.nodes[q];
      const double w = rule.weights[q];
      const Vec2 dir = problems::velocity_direction(dim, a);
      const auto y = phase_input(dim, x, a);
      const auto ydir = phase_input(dim, dir, 0.0);
      double* val = value.data() + q * z;
      model.evaluate(std::span<const double>(y.data(), dim + 1), std::span<const double>(ydir.data(), dim + 1),
                     std::span<double>(val, z), dd);
      const double eps_slope = mixed ? dot(dim, dir, deps) : 0.0;
      for (std::size_t c = 0; c < z; ++c) {
        avg_value[c] += w * val[c];
        avg_directional[c] += w * dd[c];
        avg_transport[c] += w * (mixed ? eps * dd[c] + val[c] * eps_slope : dd[c]);
      }
    }
  }

  // Column c of L u at velocity v: sum_q w_q k(v, a_q) (u_q - u(v)).
  void collision(const ProblemSpec& spec, const quadrature::AngularRule& rule, double v,
                 std::span<const double> at_v, std::span<double> out) const {
    const std::size_t z = out.size();
    if (!spec.kernel) {
      for (std::size_t c = 0; c < z; ++c) out[c] = avg_value[c] - at_v[c];
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    double total = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wk = rule.weights[q] * kernel_value(spec, v, rule.nodes[q]);
      total += wk;
      const double* val = value.data() + q * z;
      for (std::size_t c = 0; c < z; ++c) out[c] += wk * val[c];
    }
    for (std::size_t c = 0; c < z; ++c) out[c] -= total * at_v[c];
  }
};

void check_rule(const ProblemSpec& spec, const quadrature::AngularRule& rule) {
  if (rule.dimension != spec.spatial_dim) fail(ErrorKind::invalid_argument, "angular rule dimension does not match the problem");
}

LinearSystem allocate(std::size_t rows, std::size_t cols) {
  LinearSystem sys;
  sys.A.setZero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  sys.b.setZero(static_cast<Eigen::Index>(rows));
  sys.lambda.setOnes(static_cast<Eigen::Index>(rows));
  sys.row_kind.assign(rows, RowKind::boundary);
  return sys;
}

}  // namespace

const char* to_string(RowKind kind) noexcept {
  switch (kind) {
    case RowKind::macro: return "macro";
    case RowKind::micro: return "micro";
    case RowKind::rfm_interior: return "rfm-interior";
    case RowKind::boundary: return "boundary";
    case RowKind::zero_mean: return "zero-mean";
  }
  return "?";
}

LinearSystem assemble_rfm(const ProblemSpec& spec, const basis::FeatureModel& model,
                          const collocation::CollocationSet& colloc, const quadrature::AngularRule& rule,
                          const AssemblyOptions& options) {
  check_rule(spec, rule);
  const int dim = spec.spatial_dim;
  if (model.dim() != static_cast<std::size_t>(dim + 1)) {
    fail(ErrorKind::invalid_argument, "vanilla model must live on the phase space (x, v)");
  }
  const std::size_t z = model.num_columns();
  const std::size_t n_int = colloc.n_interior();
  const std::size_t n_bdy = colloc.n_boundary();
  const auto groups = group_by_x(colloc.interior);
  const std::size_t n_groups = groups.size() - 1;
  const std::size_t n_extra = options.zero_mean_rows ? n_groups : 0;

  LinearSystem sys = allocate(n_int + n_bdy + n_extra, z);
  sys.n_interior = n_int;
  sys.n_boundary = n_bdy;

  for_each_index(n_groups, options.execution, [&](std::size_t gi) {
    const Vec2 x = colloc.interior[groups[gi]].x;
    QuadratureCache cache;
    cache.build(spec, model, rule, x);
    const double eps = spec.eps_at(x);
    const double sigma_s = spec.sigma_s(x);
    const double sigma_a = spec.sigma_a(x);
    std::vector<double> val(z), dd(z), coll(z);
    for (std::size_t k = groups[gi]; k < groups[gi + 1]; ++k) {
      const double v = colloc.interior[k].v;
      const auto y = phase_input(dim, x, v);
      const auto ydir = phase_input(dim, problems::velocity_direction(dim, v), 0.0);
      model.evaluate(std::span<const double>(y.data(), dim + 1), std::span<const double>(ydir.data(), dim + 1), val, dd);
      cache.collision(spec, rule, v, val, coll);
      double* row = sys.A.data() + k * z;
      for (std::size_t c = 0; c < z; ++c) {
        row[c] = eps * dd[c] - sigma_s * coll[c] + eps * eps * sigma_a * val[c];
      }
      sys.b[static_cast<Eigen::Index>(k)] = spec.rfm_source(x, v);
      sys.row_kind[k] = RowKind::rfm_interior;
    }
    if (options.zero_mean_rows) {
      const std::size_t r = n_int + n_bdy + gi;
      std::copy(cache.avg_value.begin(), cache.avg_value.end(), sys.A.data() + r * z);
      sys.row_kind[r] = RowKind::zero_mean;
    }
  });

  for_each_index(n_bdy, options.execution, [&](std::size_t m) {
    const auto& s = colloc.boundary[m];
    const auto y = phase_input(dim, s.point.x, s.point.v);
    const std::array<double, 3> none{};
    std::vector<double> dd(z);
    const std::size_t r = n_int + m;
    model.evaluate(std::span<const double>(y.data(), dim + 1), std::span<const double>(none.data(), dim + 1),
                   std::span<double>(sys.A.data() + r * z, z), dd);
    sys.b[static_cast<Eigen::Index>(r)] = s.value;
    sys.row_kind[r] = RowKind::boundary;
  });
  return sys;
}

LinearSystem assemble_aprfm(const ProblemSpec& spec, const basis::FeatureModel& rho_model,
                            const basis::FeatureModel& g_model, const collocation::CollocationSet& colloc,
                            const quadrature::AngularRule& rule, const AssemblyOptions& options) {
  check_rule(spec, rule);
  const int dim = spec.spatial_dim;
  if (rho_model.dim() != static_cast<std::size_t>(dim)) {
    fail(ErrorKind::invalid_argument, "rho model must live on the spatial domain only");
  }
  if (g_model.dim() != static_cast<std::size_t>(dim + 1)) {
    fail(ErrorKind::invalid_argument, "g model must live on the phase space (x, v)");
  }
  const std::size_t zr = rho_model.num_columns();
  const std::size_t zg = g_model.num_columns();
  const std::size_t z = zr + zg;
  const std::size_t n_int = colloc.n_interior();
  const std::size_t n_bdy = colloc.n_boundary();
  const auto groups = group_by_x(colloc.interior);
  const std::size_t n_groups = groups.size() - 1;
  const std::size_t n_extra = options.zero_mean_rows ? n_groups : 0;
  const bool mixed = spec.scaling == Scaling::mixed;

  LinearSystem sys = allocate(2 * n_int + n_bdy + n_extra, z);
  sys.n_interior = n_int;
  sys.n_boundary = n_bdy;

  for_each_index(n_groups, options.execution, [&](std::size_t gi) {
    const Vec2 x = colloc.interior[groups[gi]].x;
    QuadratureCache cache;
    cache.build(spec, g_model, rule, x);
    const double eps = spec.eps_at(x);
    const Vec2 deps = spec.eps_grad_at(x);
    const double sigma_s = spec.sigma_s(x);
    const double sigma_a = spec.sigma_a(x);
    const double macro_rhs = spec.macro_source(x);
    std::vector<double> rho_val(zr), rho_dd(zr), g_val(zg), g_dd(zg), coll(zg);
    for (std::size_t k = groups[gi]; k < groups[gi + 1]; ++k) {
      const double v = colloc.interior[k].v;
      const Vec2 dir = problems::velocity_direction(dim, v);
      rho_model.evaluate(std::span<const double>(x.data(), dim), std::span<const double>(dir.data(), dim), rho_val, rho_dd);
      const auto y = phase_input(dim, x, v);
      const auto ydir = phase_input(dim, dir, 0.0);
      g_model.evaluate(std::span<const double>(y.data(), dim + 1), std::span<const double>(ydir.data(), dim + 1), g_val, g_dd);

      double* macro = sys.A.data() + (2 * k) * z;
      for (std::size_t c = 0; c < zr; ++c) macro[c] = sigma_a * rho_val[c];
      std::copy(cache.avg_transport.begin(), cache.avg_transport.end(), macro + zr);
      sys.b[static_cast<Eigen::Index>(2 * k)] = macro_rhs;
      sys.row_kind[2 * k] = RowKind::macro;

      double* micro = sys.A.data() + (2 * k + 1) * z;
      std::copy(rho_dd.begin(), rho_dd.end(), micro);
      double* micro_g = micro + zr;
      if (mixed) {
        const double eps_slope = dot(dim, dir, deps);
        for (std::size_t c = 0; c < zg; ++c) {
          micro_g[c] = (eps * g_dd[c] + g_val[c] * eps_slope) - cache.avg_transport[c] + sigma_s * g_val[c];
        }
      } else {
        cache.collision(spec, rule, v, g_val, coll);
        for (std::size_t c = 0; c < zg; ++c) {
          micro_g[c] = eps * (g_dd[c] - cache.avg_directional[c]) - sigma_s * coll[c] + eps * eps * sigma_a * g_val[c];
        }
      }
      sys.b[static_cast<Eigen::Index>(2 * k + 1)] = spec.micro_source(x, v);
      sys.row_kind[2 * k + 1] = RowKind::micro;
    }
    if (options.zero_mean_rows) {
      const std::size_t r = 2 * n_int + n_bdy + gi;
      std::copy(cache.avg_value.begin(), cache.avg_value.end(), sys.A.data() + r * z + zr);
      sys.row_kind[r] = RowKind::zero_mean;
    }
  });

  for_each_index(n_bdy, options.execution, [&](std::size_t m) {
    const auto& s = colloc.boundary[m];
    const Vec2& x = s.point.x;
    const std::array<double, 3> none{};
    std::vector<double> dd(std::max(zr, zg));
    const std::size_t r = 2 * n_int + m;
    double* row = sys.A.data() + r * z;
    rho_model.evaluate(std::span<const double>(x.data(), dim), std::span<const double>(none.data(), dim),
                       std::span<double>(row, zr), std::span<double>(dd.data(), zr));
    const auto y = phase_input(dim, x, s.point.v);
    g_model.evaluate(std::span<const double>(y.data(), dim + 1), std::span<const double>(none.data(), dim + 1),
                     std::span<double>(row + zr, zg), std::span<double>(dd.data(), zg));
    const double eps = spec.eps_at(x);
    for (std::size_t c = 0; c < zg; ++c) row[zr + c] *= eps;
    sys.b[static_cast<Eigen::Index>(r)] = s.value;
    sys.row_kind[r] = RowKind::boundary;
  });
  return sys;
}

LinearSystem rescale_rows(LinearSystem sys) {
  const Eigen::Index n = sys.A.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!sys.A.row(k).allFinite() || !std::isfinite(sys.b[k])) {
      fail(ErrorKind::invalid_input, "row " + std::to_string(k) + " (" + to_string(sys.row_kind[static_cast<std::size_t>(k)]) +
                                         ") has a non-finite entry");
    }
    const double m = sys.A.row(k).cwiseAbs().maxCoeff();
    if (!(m > 0.0)) {
      fail(ErrorKind::degenerate_row, "row " + std::to_string(k) + " (" + to_string(sys.row_kind[static_cast<std::size_t>(k)]) +
                                          ") is identically zero");
    }
    // Dividing (rather than multiplying by 1/m) makes the max entry exactly one,
    // so a second pass is the identity.
    sys.A.row(k) /= m;
    sys.b[k] /= m;
    sys.lambda[k] /= m;
  }
  return sys;
}

double reconstruct_f(const ProblemSpec& spec, const basis::FeatureModel& rho_model, const basis::FeatureModel& g_model,
                     std::span<const double> coeffs, const Vec2& x, double v) {
  const std::size_t zr = rho_model.num_columns();
  if (coeffs.size() != zr + g_model.num_columns()) fail(ErrorKind::invalid_argument, "coefficient length mismatch");
  const int dim = spec.spatial_dim;
  const double rho = basis::model_eval(rho_model, coeffs.subspan(0, zr), std::span<const double>(x.data(), dim));
  const auto y = phase_input(dim, x, v);
  const double g = basis::model_eval(g_model, coeffs.subspan(zr), std::span<const double>(y.data(), dim + 1));
  return rho + spec.eps_at(x) * g;
}

namespace {

static_assert(std::endian::native == std::endian::little, "debug dump assumes a little-endian host");

template <class T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void write_debug_dump(const LinearSystem& sys, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io_failure, "cannot open " + path.string() + " for writing");
  const auto n = static_cast<std::uint64_t>(sys.A.rows());
  const auto z = static_cast<std::uint64_t>(sys.A.cols());
  const std::uint64_t kind_offset = 5 * 8 + 8 * (n * z + 2 * n);
  put(out, n);
  put(out, z);
  put(out, static_cast<std::uint64_t>(sys.n_interior));
  put(out, static_cast<std::uint64_t>(sys.n_boundary));
  put(out, kind_offset);
  out.write(reinterpret_cast<const char*>(sys.A.data()), static_cast<std::streamsize>(8 * n * z));
  out.write(reinterpret_cast<const char*>(sys.b.data()), static_cast<std::streamsize>(8 * n));
  out.write(reinterpret_cast<const char*>(sys.lambda.data()), static_cast<std::streamsize>(8 * n));
  for (RowKind k : sys.row_kind) put(out, static_cast<std::uint8_t>(k));
  if (!out) fail(ErrorKind::io_failure, "failed writing " + path.string());
}

LinearSystem read_debug_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_failure, "cannot open " + path.string());
  const auto n = get<std::uint64_t>(in);
  const auto z = get<std::uint64_t>(in);
  LinearSystem sys = allocate(n, z);
  sys.n_interior = get<std::uint64_t>(in);
  sys.n_boundary = get<std::uint64_t>(in);
  const auto kind_offset = get<std::uint64_t>(in);
  in.read(reinterpret_cast<char*>(sys.A.data()), static_cast<std::streamsize>(8 * n * z));
  in.read(reinterpret_cast<char*>(sys.b.data()), static_cast<std::streamsize>(8 * n));
  in.read(reinterpret_cast<char*>(sys.lambda.data()), static_cast<std::streamsize>(8 * n));
  in.seekg(static_cast<std::streamoff>(kind_offset));
  for (auto& k : sys.row_kind) k = static_cast<RowKind>(get<std::uint8_t>(in));
  if (!in) fail(ErrorKind::io_failure, "truncated debug dump " + path.string());
  return sys;
}

}  // namespace aprfm::assemble
