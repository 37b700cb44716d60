#include "aprfm/collocation.hpp"

#include <cmath>
#include <numbers>

#include "aprfm/error.hpp"

namespace aprfm::collocation {

using problems::Geometry;
using problems::kHoleHalfWidth;
using problems::ProblemSpec;

namespace {

struct Face {
  int axis;           // axis normal to the face
  double position;    // coordinate along `axis`
  double lo, hi;      // extent along the tangential axis
  Vec2 normal;
};

std::vector<Face> faces_of(const ProblemSpec& problem) {
  std::vector<Face> faces;
  if (problem.spatial_dim == 1) {
    faces.push_back({0, 0.0, 0.0, 0.0, {-1.0, 0.0}});
    faces.push_back({0, 1.0, 0.0, 0.0, {1.0, 0.0}});
    return faces;
  }
  faces.push_back({0, -1.0, -1.0, 1.0, {-1.0, 0.0}});
  faces.push_back({0, 1.0, -1.0, 1.0, {1.0, 0.0}});
  faces.push_back({1, -1.0, -1.0, 1.0, {0.0, -1.0}});
  faces.push_back({1, 1.0, -1.0, 1.0, {0.0, 1.0}});
  if (problem.geometry == Geometry::annulus) {
    const double h = kHoleHalfWidth;
    // Outward normals of the domain point into the hole.
    faces.push_back({0, -h, -h, h, {1.0, 0.0}});
    faces.push_back({0, h, -h, h, {-1.0, 0.0}});
    faces.push_back({1, -h, -h, h, {0.0, 1.0}});
    faces.push_back({1, h, -h, h, {0.0, -1.0}});
  }
  return faces;
}

void check_counts(const ProblemSpec& problem, SpatialCounts n, int nv, int minimum) {
  const int dims = problem.spatial_dim;
  for (int k = 0; k < dims; ++k) {
    if (n[k] < minimum) fail(ErrorKind::invalid_argument, "spatial collocation count below minimum");
  }
  if (nv < minimum) fail(ErrorKind::invalid_argument, "velocity collocation count below minimum");
}

std::vector<Vec2> spatial_nodes(const ProblemSpec& problem, SpatialCounts n) {
  const Vec2 lo = problem.spatial_lo();
  const Vec2 hi = problem.spatial_hi();
  std::vector<Vec2> out;
  const auto xs = cell_centers(lo[0], hi[0], n[0]);
  if (problem.spatial_dim == 1) {
    for (double x : xs) out.push_back({x, 0.0});
    return out;
  }
  const auto ys = cell_centers(lo[1], hi[1], n[1]);
  for (double x : xs) {
    for (double y : ys) {
      const Vec2 p{x, y};
      if (!problem.in_hole(p)) out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::vector<double> cell_centers(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double h = (hi - lo) / n;
  for (int k = 0; k < n; ++k) out[k] = lo + (k + 0.5) * h;
  return out;
}

std::vector<double> velocity_nodes(const ProblemSpec& problem, int n_velocity) {
  return cell_centers(problem.velocity_lo(), problem.velocity_hi(), n_velocity);
}

std::vector<PhasePoint> interior_grid(const ProblemSpec& problem, SpatialCounts n_spatial, int n_velocity) {
  check_counts(problem, n_spatial, n_velocity, 2);
  const auto xs = spatial_nodes(problem, n_spatial);
  const auto vs = velocity_nodes(problem, n_velocity);
  std::vector<PhasePoint> out;
  out.reserve(xs.size() * vs.size());
  for (const Vec2& x : xs) {
    for (double v : vs) out.push_back({x, v});
  }
  return out;
}

std::vector<BoundarySample> inflow_boundary(const ProblemSpec& problem, SpatialCounts n_face, int n_velocity) {
  check_counts(problem, n_face, n_velocity, 1);
  if (!problem.boundary_value) fail(ErrorKind::invalid_problem, "problem has no boundary data");
  const auto vs = velocity_nodes(problem, n_velocity);
  std::vector<BoundarySample> out;
  for (const Face& face : faces_of(problem)) {
    std::vector<Vec2> nodes;
    if (problem.spatial_dim == 1) {
      nodes.push_back({face.position, 0.0});
    } else {
      const int tangential = 1 - face.axis;
      for (double t : cell_centers(face.lo, face.hi, n_face[tangential])) {
        Vec2 p{};
        p[face.axis] = face.position;
        p[tangential] = t;
        nodes.push_back(p);
      }
    }
    for (const Vec2& x : nodes) {
      for (double v : vs) {
        const Vec2 dir = problems::velocity_direction(problem.spatial_dim, v);
        const double vn = dir[0] * face.normal[0] + dir[1] * face.normal[1];
        if (!(vn < 0.0)) continue;
        out.push_back({{x, v}, face.normal, problem.boundary_value(x, v)});
      }
    }
  }
  return out;
}

CollocationSet make_collocation(const ProblemSpec& problem, SpatialCounts n_spatial, int n_velocity) {
  CollocationSet set;
  set.interior = interior_grid(problem, n_spatial, n_velocity);
  set.boundary = inflow_boundary(problem, n_spatial, n_velocity);
  return set;
}

EvaluationGrid evaluation_grid(const ProblemSpec& problem) {
  if (problem.spatial_dim == 1) return evaluation_grid(problem, {128, 1}, 256);
  return evaluation_grid(problem, {64, 64}, 32);
}

EvaluationGrid evaluation_grid(const ProblemSpec& problem, SpatialCounts n_spatial, int n_velocity) {
  check_counts(problem, n_spatial, n_velocity, 1);
  EvaluationGrid grid;
  grid.spatial_dim = problem.spatial_dim;
  grid.spatial = spatial_nodes(problem, n_spatial);
  grid.velocities = velocity_nodes(problem, n_velocity);
  return grid;
}

bool avoids_pou_kinks(const std::vector<PhasePoint>& points, const basis::BoxPartition& partition,
                      int spatial_dim, bool phase, double margin) {
  const std::size_t d = partition.dim();
  for (const PhasePoint& p : points) {
    std::array<double, 3> y{};
    for (int k = 0; k < spatial_dim; ++k) y[k] = p.x[k];
    if (phase) y[spatial_dim] = p.v;
    for (const basis::Box& box : partition.boxes()) {
      for (std::size_t k = 0; k < d; ++k) {
        const double z = std::abs((y[k] - box.center(k)) / box.radius(k));
        if (std::abs(z - 0.75) < margin || std::abs(z - 1.25) < margin) return false;
      }
    }
  }
  return true;
}

}  // namespace aprfm::collocation
