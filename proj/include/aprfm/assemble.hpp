#pragma once

// Dense least-squares systems for the vanilla random feature method and the
// micro-macro (asymptotic-preserving) variant.
//
// Vanilla rows:    eps v.grad f - sigma_s L f + eps^2 sigma_a f = rfm_source
// Micro-macro:     macro  <v.grad g> + sigma_a rho              = <Q>
//                  micro  v.grad rho + eps (I - Pi)(v.grad g)
//                           - sigma_s L g + eps^2 sigma_a g     = eps (Q - <Q>)
// Boundary rows impose f = rho + eps g (or f itself) on inflow samples.
// APRFM interior point k owns rows 2k (macro) and 2k + 1 (micro); boundary
// rows follow. Columns: rho features first, then g features.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aprfm/basis.hpp"
#include "aprfm/collocation.hpp"
#include "aprfm/parallel.hpp"
#include "aprfm/problems.hpp"
#include "aprfm/quadrature.hpp"

namespace aprfm::assemble {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class RowKind : std::uint8_t { macro = 0, micro = 1, rfm_interior = 2, boundary = 3, zero_mean = 4 };

const char* to_string(RowKind kind) noexcept;

struct LinearSystem {
  Matrix A;
  Vector b;
  std::vector<RowKind> row_kind;
  Vector lambda;  // cumulative row scaling, 1 before rescaling
  std::size_t n_interior = 0;
  std::size_t n_boundary = 0;

  Eigen::Index rows() const noexcept { return A.rows(); }
  Eigen::Index cols() const noexcept { return A.cols(); }
};

struct AssemblyOptions {
  Execution execution = Execution::parallel;
  /// Appends one row <g_M>(x) = 0 per distinct interior x. Off by default.
  bool zero_mean_rows = false;
};

LinearSystem assemble_rfm(const problems::ProblemSpec& spec, const basis::FeatureModel& model,
                          const collocation::CollocationSet& colloc, const quadrature::AngularRule& rule,
                          const AssemblyOptions& options = {});

LinearSystem assemble_aprfm(const problems::ProblemSpec& spec, const basis::FeatureModel& rho_model,
                            const basis::FeatureModel& g_model, const collocation::CollocationSet& colloc,
                            const quadrature::AngularRule& rule, const AssemblyOptions& options = {});

/// Divides each row and its right-hand side by the row's max-abs entry.
LinearSystem rescale_rows(LinearSystem sys);

/// f = rho_M(x) + eps g_M(x, v); eps(x) for mixed-scale problems.
double reconstruct_f(const problems::ProblemSpec& spec, const basis::FeatureModel& rho_model,
                     const basis::FeatureModel& g_model, std::span<const double> coeffs,
                     const problems::Vec2& x, double v);

/// Phase-space input for a g or f model: (x_1..x_d, v).
inline std::array<double, 3> phase_input(int spatial_dim, const problems::Vec2& x, double v) noexcept {
  std::array<double, 3> y{x[0], x[1], 0.0};
  y[spatial_dim] = v;
  return y;
}

/// Binary dump: five little-endian u64 (N, Z, N_int, N_bdy, row-kind table
/// offset), then A row-major, b, lambda as f64, then N row-kind bytes.
void write_debug_dump(const LinearSystem& sys, const std::filesystem::path& path);
LinearSystem read_debug_dump(const std::filesystem::path& path);

}  // namespace aprfm::assemble
