#pragma once

// Ground truth on evaluation grids: exact solutions, a first-order upwind
// discrete-ordinates oracle with source iteration, the relative l2 metric,
// and evaluation of fitted models on grids.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aprfm/basis.hpp"
#include "aprfm/collocation.hpp"
#include "aprfm/parallel.hpp"
#include "aprfm/problems.hpp"
#include "aprfm/quadrature.hpp"

namespace aprfm::reference {

using collocation::EvaluationGrid;
using problems::Vec2;

/// Values on an evaluation grid: one per phase point (x-major) or, for
/// density fields, one per spatial node.
struct GridField {
  EvaluationGrid grid;
  std::vector<double> values;
  bool density = false;

  std::size_t expected_size() const noexcept { return density ? grid.spatial.size() : grid.size(); }
};

GridField exact_field(const problems::ProblemSpec& spec, const EvaluationGrid& grid);
/// Exact density, from exact_rho when present, otherwise <f_ex> by `rule`.
GridField exact_density(const problems::ProblemSpec& spec, const EvaluationGrid& grid,
                        const quadrature::AngularRule& rule);

/// sqrt(sum |approx - ref|^2 / sum |ref|^2).
double relative_l2(const GridField& approx, const GridField& ref);
double relative_l2(std::span<const double> approx, std::span<const double> ref);

/// rho(x) = <f(x, .)> by `rule` at every spatial node of `grid`.
using PhaseSampler = std::function<double(const Vec2& x, double v)>;
GridField density_field(const PhaseSampler& f, const quadrature::AngularRule& rule, const EvaluationGrid& grid);
/// Density from samples f(x_i, a_q) already taken at the rule nodes,
/// stored x-major (spatial node, then ordinate).
GridField density_field(std::span<const double> samples_at_nodes, const quadrature::AngularRule& rule,
                        const EvaluationGrid& grid);

struct FdmOptions {
  collocation::SpatialCounts eval_counts{0, 0};  // 0 selects the default evaluation grid
  int eval_velocities = 0;
  /// Cells per evaluation cell along each axis; 0 selects 5 in 1D, 3 in 2D.
  /// Odd values put a cell centre on every evaluation node. 2D needs odd.
  int refine = 0;
  int ordinates = 16;
  double sweep_tol = 1e-12;
  long max_iters = 200000;
};

struct FdmResult {
  GridField f;
  GridField rho;
  long iterations = 0;
  double last_change = 0.0;
  int cells_per_axis = 0;
};

/// Upwind discrete ordinates for
///   eps(x) v.grad f - sigma_s L f + eps(x)^2 sigma_a f = rfm_source
/// on the AngularRule ordinates, inflow data imposed on ghost cells,
/// collision lagged (source iteration) until the max change < sweep_tol.
/// Off-node evaluation velocities get one extra sweep with the converged
/// collision source. Throws NoConvergence after max_iters.
FdmResult fdm_reference(const problems::ProblemSpec& spec, const FdmOptions& options = {});

/// A fitted approximation: f = rho_M + eps g_M (APRFM) or f = f_M (RFM).
struct Approximation {
  const problems::ProblemSpec* spec = nullptr;
  const basis::FeatureModel* rho_model = nullptr;  // null for RFM
  const basis::FeatureModel* phase_model = nullptr;  // g for APRFM, f for RFM
  Eigen::VectorXd coeffs;

  double f(const Vec2& x, double v) const;
  double density(const Vec2& x, const quadrature::AngularRule& rule) const;
};

GridField evaluate_f(const Approximation& approx, const EvaluationGrid& grid, Execution execution = Execution::parallel);
GridField evaluate_density(const Approximation& approx, const EvaluationGrid& grid, const quadrature::AngularRule& rule,
                           Execution execution = Execution::parallel);

}  // namespace aprfm::reference
