#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aprfm/collocation.hpp"
#include "aprfm/error.hpp"

using namespace aprfm;
using namespace aprfm::collocation;
using problems::ProblemId;

TEST(Collocation, CellCenters) {
  const auto c = cell_centers(0.0, 1.0, 4);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_DOUBLE_EQ(c[0], 0.125);
  EXPECT_DOUBLE_EQ(c[3], 0.875);
}

TEST(Collocation, InteriorCounts) {
  const auto ex1 = problems::catalog(ProblemId::ex1, 1.0);
  EXPECT_EQ(interior_grid(ex1, {2, 1}, 2).size(), 4u);
  const auto ex4 = problems::catalog(ProblemId::ex4, 1.0);
  EXPECT_EQ(interior_grid(ex4, {32, 32}, 64).size(), 65536u);
  EXPECT_THROW(interior_grid(ex1, {1, 1}, 2), Error);
  const auto ex6 = problems::catalog(ProblemId::ex6, 1.0);
  for (const auto& p : interior_grid(ex6, {32, 32}, 8)) {
    EXPECT_GE(std::max(std::abs(p.x[0]), std::abs(p.x[1])), 1.0 / 3.0);
  }
  // Ordering is x-major then v.
  const auto pts = interior_grid(ex1, {4, 1}, 3);
  EXPECT_EQ(pts[0].x, pts[2].x);
  EXPECT_NE(pts[2].x, pts[3].x);
  EXPECT_LT(pts[0].v, pts[1].v);
}

TEST(Collocation, InflowSlab) {
  const auto ex1 = problems::catalog(ProblemId::ex1, 1.0);
  const auto bdy = inflow_boundary(ex1, {1, 1}, 8);
  ASSERT_EQ(bdy.size(), 8u);
  for (const auto& s : bdy) {
    if (s.point.x[0] == 0.0) {
      EXPECT_GT(s.point.v, 0.0);
      EXPECT_EQ(s.value, 1.0);
    } else {
      EXPECT_EQ(s.point.x[0], 1.0);
      EXPECT_LT(s.point.v, 0.0);
      EXPECT_EQ(s.value, 0.0);
    }
    EXPECT_LT(s.point.v * s.normal[0], 0.0);
  }
}

TEST(Collocation, InflowAnnulusInnerFace) {
  const auto ex6 = problems::catalog(ProblemId::ex6, 1.0);
  const auto bdy = inflow_boundary(ex6, {32, 32}, 64);
  int inner = 0;
  for (const auto& s : bdy) {
    const auto d = problems::velocity_direction(2, s.point.v);
    EXPECT_LT(d[0] * s.normal[0] + d[1] * s.normal[1], 0.0);
    if (s.point.x[0] == 1.0 / 3.0 && std::abs(s.point.x[1]) <= 1.0 / 3.0) {
      ++inner;
      EXPECT_EQ(s.normal[0], -1.0);
      EXPECT_GT(std::cos(s.point.v), 0.0);
      EXPECT_NEAR(s.value, std::exp(-1.0 / 3.0 - s.point.x[1]), 1e-14);
    }
  }
  EXPECT_GT(inner, 0);
}

TEST(Collocation, MissingBoundaryData) {
  auto spec = problems::catalog(ProblemId::ex1, 1.0);
  spec.boundary_value = nullptr;
  try {
    inflow_boundary(spec, {1, 1}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_problem);
  }
}

TEST(Collocation, EvaluationGrids) {
  EXPECT_EQ(evaluation_grid(problems::catalog(ProblemId::ex1, 1.0)).size(), 32768u);
  EXPECT_EQ(evaluation_grid(problems::catalog(ProblemId::ex4, 1.0)).size(), 131072u);
  // Hole count from cell centres of the 64 x 64 grid.
  int hole = 0;
  for (double a : cell_centers(-1.0, 1.0, 64)) {
    for (double b : cell_centers(-1.0, 1.0, 64)) {
      if (std::max(std::abs(a), std::abs(b)) < 1.0 / 3.0) ++hole;
    }
  }
  EXPECT_EQ(evaluation_grid(problems::catalog(ProblemId::ex6, 1.0)).size(), 131072u - 32u * hole);
}

TEST(Collocation, DyadicGridsAvoidPouKinks) {
  // Holds when every box holds a multiple of 8 nodes per axis.
  const auto ex1 = problems::catalog(ProblemId::ex1, 1.0);
  for (int n : {32, 64, 128}) {
    const auto pts = interior_grid(ex1, {n, 1}, 2 * n);
    for (int mx : {1, 2, 4}) {
      for (int mv : {1, 2, 4}) {
        const auto part = basis::BoxPartition::uniform({0.0, -1.0}, {1.0, 1.0}, {mx, mv});
        EXPECT_TRUE(avoids_pou_kinks(pts, part, 1, true));
      }
    }
  }
}

TEST(Collocation, Deterministic) {
  const auto ex5 = problems::catalog(ProblemId::ex5, 1.0);
  const auto a = make_collocation(ex5, {8, 8}, 8);
  const auto b = make_collocation(ex5, {8, 8}, 8);
  ASSERT_EQ(a.n_interior(), b.n_interior());
  ASSERT_EQ(a.n_boundary(), b.n_boundary());
  for (std::size_t k = 0; k < a.n_interior(); ++k) {
    EXPECT_EQ(a.interior[k].x, b.interior[k].x);
    EXPECT_EQ(a.interior[k].v, b.interior[k].v);
  }
}

TEST(Collocation, FourNodesPerBoxHitKinks) {
  const auto ex1 = problems::catalog(ProblemId::ex1, 1.0);
  const auto pts = interior_grid(ex1, {16, 1}, 4);
  const auto part = basis::BoxPartition::uniform({0.0, -1.0}, {1.0, 1.0}, {4, 1});
  EXPECT_FALSE(avoids_pou_kinks(pts, part, 1, true));
  // Harmless: phi_b has matching one-sided derivatives (both zero) at the joins.
  for (double z : {0.75, 1.25}) {
    EXPECT_NEAR(basis::pou_univariate_derivative(basis::PouKind::phi_b, z - 1e-9), 0.0, 1e-7);
    EXPECT_NEAR(basis::pou_univariate_derivative(basis::PouKind::phi_b, z + 1e-9), 0.0, 1e-7);
  }
}
