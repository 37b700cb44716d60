#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "aprfm/basis.hpp"
#include "aprfm/problems.hpp"

namespace aprfm::collocation {

using problems::Vec2;

/// Phase-space point. `v` is the velocity in 1D and the angle alpha in 2D.
struct PhasePoint {
  Vec2 x{};
  double v = 0.0;
};

struct BoundarySample {
  PhasePoint point;
  Vec2 normal{};  // outward normal of the spatial domain
  double value = 0.0;
};

struct CollocationSet {
  std::vector<PhasePoint> interior;
  std::vector<BoundarySample> boundary;

  std::size_t n_interior() const noexcept { return interior.size(); }
  std::size_t n_boundary() const noexcept { return boundary.size(); }
};

/// Per-axis spatial counts; the second entry is ignored in 1D.
using SpatialCounts = std::array<int, 2>;

/// Cell-centred nodes lo + (k + 1/2)(hi - lo)/n, k = 0..n-1.
std::vector<double> cell_centers(double lo, double hi, int n);

/// Velocity nodes: cell-centred in [-1, 1] (1D) or in [0, 2pi) (2D).
std::vector<double> velocity_nodes(const problems::ProblemSpec& problem, int n_velocity);

/// Tensor grid, x-major then v; annulus drops points inside the hole.
std::vector<PhasePoint> interior_grid(const problems::ProblemSpec& problem, SpatialCounts n_spatial,
                                      int n_velocity);

/// Face nodes crossed with velocity nodes, keeping v . n < 0 only.
std::vector<BoundarySample> inflow_boundary(const problems::ProblemSpec& problem, SpatialCounts n_face,
                                            int n_velocity);

/// Interior grid plus inflow boundary with face resolution equal to the
/// interior per-axis counts.
CollocationSet make_collocation(const problems::ProblemSpec& problem, SpatialCounts n_spatial, int n_velocity);

/// Uniform measurement grid: spatial nodes times velocity nodes, x-major.
struct EvaluationGrid {
  int spatial_dim = 1;
  std::vector<Vec2> spatial;
  std::vector<double> velocities;

  std::size_t size() const noexcept { return spatial.size() * velocities.size(); }
  PhasePoint point(std::size_t index) const noexcept {
    return {spatial[index / velocities.size()], velocities[index % velocities.size()]};
  }
};

/// (128, 256) in 1D, (64, 64, 32) in 2D, hole excluded for the annulus.
EvaluationGrid evaluation_grid(const problems::ProblemSpec& problem);
EvaluationGrid evaluation_grid(const problems::ProblemSpec& problem, SpatialCounts n_spatial, int n_velocity);

/// True when no point sits within `margin` of a phi_b kink (|z| = 3/4 or 5/4)
/// of any box in `partition`. `phase` selects (x, v) coordinates versus x only.
bool avoids_pou_kinks(const std::vector<PhasePoint>& points, const basis::BoxPartition& partition,
                      int spatial_dim, bool phase, double margin = 1e-12);

}  // namespace aprfm::collocation
