#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "aprfm/assemble.hpp"
#include "aprfm/error.hpp"
#include "aprfm/reference.hpp"
#include "aprfm/solve.hpp"
#include "oracles.hpp"

using namespace aprfm;
using namespace aprfm::assemble;
using problems::ProblemId;
using problems::Vec2;

namespace {

double frobenius_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(AssembleRfm, Shape) {
  const auto spec = problems::catalog(ProblemId::ex1, 1.0);
  const auto model = oracle::make_phase_model(spec, 128, {1, 1});
  const auto colloc = collocation::make_collocation(spec, {64, 1}, 128);
  const auto sys = assemble_rfm(spec, model, colloc, quadrature::angular_rule(1, 16));
  EXPECT_EQ(sys.rows(), static_cast<Eigen::Index>(8192 + colloc.n_boundary()));
  EXPECT_EQ(sys.cols(), 128);
  EXPECT_EQ(colloc.n_boundary(), 128u);
  EXPECT_EQ(sys.row_kind.front(), RowKind::rfm_interior);
  EXPECT_EQ(sys.row_kind.back(), RowKind::boundary);
  EXPECT_TRUE((sys.lambda.array() == 1.0).all());
}

TEST(AssembleRfm, OperatorOnExactField) {
  // eps v f_x - L f for f = 1 - x equals -eps v, the stored RFM source.
  const auto rule = quadrature::angular_rule(1, 16);
  for (double eps : {1.0, 1e-3}) {
    const auto spec = problems::catalog(ProblemId::ex1, eps);
    for (const auto& p : collocation::interior_grid(spec, {8, 1}, 8)) {
      std::vector<double> f(rule.size(), spec.exact_f(p.x, 0.0));
      const double lf = quadrature::average(rule, f) - spec.exact_f(p.x, p.v);
      const double t = eps * p.v * spec.exact_grad_f(p.x, p.v)[0] - lf;
      EXPECT_NEAR(t + eps * p.v, 0.0, 1e-15);
      EXPECT_NEAR(t - spec.rfm_source(p.x, p.v), 0.0, 1e-15);
    }
  }
}

TEST(AssembleRfm, KineticRegimeSolve) {
  const auto spec = problems::catalog(ProblemId::ex1, 1.0);
  const auto model = oracle::make_phase_model(spec, 128, {1, 1});
  const auto rule = quadrature::angular_rule(1, 16);
  const auto colloc = collocation::make_collocation(spec, {32, 1}, 64);
  const auto sys = rescale_rows(assemble_rfm(spec, model, colloc, rule));
  const auto report = solve::lstsq(sys);
  reference::Approximation approx{&spec, nullptr, &model, report.coeffs};
  const auto grid = collocation::evaluation_grid(spec);
  const double err = reference::relative_l2(reference::evaluate_f(approx, grid), reference::exact_field(spec, grid));
  EXPECT_LT(err, 1e-6);
}

TEST(AssembleAprfm, ShapeAndColumnOrder) {
  const auto spec = problems::catalog(ProblemId::ex1, 0.5);
  const auto m = oracle::make_models(spec, 8, 12, {2}, 2);
  const auto colloc = collocation::make_collocation(spec, {8, 1}, 8);
  const auto sys = assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(1, 16));
  EXPECT_EQ(sys.rows(), static_cast<Eigen::Index>(2 * colloc.n_interior() + colloc.n_boundary()));
  EXPECT_EQ(sys.cols(), static_cast<Eigen::Index>(2 * 8 + 4 * 12));
  EXPECT_EQ(sys.row_kind[0], RowKind::macro);
  EXPECT_EQ(sys.row_kind[1], RowKind::micro);
  // Boundary row = [psi phi^rho(x) | eps psi phi^g(x, v)], rho blocks first.
  const std::size_t r = 2 * colloc.n_interior();
  const auto& s = colloc.boundary[0];
  std::vector<double> rv(16), rd(16), gv(48), gd(48);
  const std::vector<double> zero1{0.0}, zero2{0.0, 0.0};
  m.rho.evaluate(std::vector<double>{s.point.x[0]}, zero1, rv, rd);
  m.g.evaluate(std::vector<double>{s.point.x[0], s.point.v}, zero2, gv, gd);
  for (int c = 0; c < 16; ++c) EXPECT_EQ(sys.A(static_cast<Eigen::Index>(r), c), rv[static_cast<std::size_t>(c)]);
  for (int c = 0; c < 48; ++c) {
    EXPECT_EQ(sys.A(static_cast<Eigen::Index>(r), 16 + c), 0.5 * gv[static_cast<std::size_t>(c)]);
  }
}

TEST(AssembleAprfm, LimitSystemAtZeroEpsilon) {
  for (ProblemId id : {ProblemId::ex1, ProblemId::ex4}) {
    const auto spec0 = problems::catalog(id, 0.0);
    const int dim = spec0.spatial_dim;
    const auto m = dim == 1 ? oracle::make_models(spec0, 16, 16, {1}, 2) : oracle::make_models(spec0, 8, 8, {1, 1}, 2);
    const auto rule = quadrature::angular_rule(dim, 16);
    const auto colloc = dim == 1 ? collocation::make_collocation(spec0, {16, 1}, 16)
                                 : collocation::make_collocation(spec0, {6, 6}, 8);
    const Eigen::MatrixXd limit = oracle::limit_interior_rows(spec0, m.rho, m.g, colloc.interior, rule);
    const auto rows = limit.rows();
    const auto sys0 = assemble_aprfm(spec0, m.rho, m.g, colloc, rule);
    const Eigen::MatrixXd a0 = sys0.A.topRows(rows);
    EXPECT_LE((a0 - limit).cwiseAbs().maxCoeff(), 1e-15);

    const auto spec_tiny = problems::catalog(id, 1e-16);
    const auto sys_tiny = assemble_aprfm(spec_tiny, m.rho, m.g, colloc, rule);
    EXPECT_LE(frobenius_rel(sys_tiny.A.topRows(rows), limit), 1e-12);
  }
}

TEST(AssembleAprfm, RowsMatchOperatorApplication) {
  // (A theta - b) on interior rows equals the micro-macro residual of the
  // fields (rho_M, g_M) built from theta, evaluated by the oracle.
  for (ProblemId id : {ProblemId::ex1, ProblemId::ex3, ProblemId::ex4}) {
    const auto spec = problems::catalog(id, 0.3);
    const int dim = spec.spatial_dim;
    const auto m = dim == 1 ? oracle::make_models(spec, 8, 8, {2}, 2) : oracle::make_models(spec, 6, 6, {1, 1}, 2);
    const auto rule = quadrature::angular_rule(dim, 16);
    const auto colloc = dim == 1 ? collocation::make_collocation(spec, {16, 1}, 8)
                                 : collocation::make_collocation(spec, {6, 6}, 4);
    const auto sys = assemble_aprfm(spec, m.rho, m.g, colloc, rule);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd theta(sys.cols());
    for (auto& t : theta) t = u(rng);
    const Eigen::VectorXd r = sys.A * theta - sys.b;
    const std::size_t zr = m.rho.num_columns();
    const std::span<const double> all(theta.data(), static_cast<std::size_t>(theta.size()));
    const problems::RhoFn rho = [&](const Vec2& x) {
      return oracle::model_sample(m.rho, all.subspan(0, zr), x, 0.0, false, dim);
    };
    const problems::GFn g = [&](const Vec2& x, double v) {
      return oracle::model_sample(m.g, all.subspan(zr), x, v, true, dim);
    };
    std::uniform_int_distribution<std::size_t> pick(0, colloc.n_interior() - 1);
    for (int t = 0; t < 100; ++t) {
      const std::size_t k = pick(rng);
      const auto& p = colloc.interior[k];
      const auto res = problems::micro_macro_residuals(spec, rule, rho, g, p.x, p.v);
      EXPECT_NEAR(r(static_cast<Eigen::Index>(2 * k)), res.macro, 1e-12 * std::max(1.0, std::abs(res.macro)));
      EXPECT_NEAR(r(static_cast<Eigen::Index>(2 * k + 1)), res.micro, 1e-12 * std::max(1.0, std::abs(res.micro)));
    }
  }
}

TEST(AssembleAprfm, Linearity) {
  const auto spec = problems::catalog(ProblemId::ex1, 0.1);
  const auto m = oracle::make_models(spec, 8, 8, {1}, 1);
  const auto colloc = collocation::make_collocation(spec, {8, 1}, 8);
  const auto sys = assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(1, 16));
  const Eigen::VectorXd t1 = Eigen::VectorXd::Random(sys.cols());
  const Eigen::VectorXd t2 = Eigen::VectorXd::Random(sys.cols());
  EXPECT_LE((sys.A * (t1 + t2) - sys.A * t1 - sys.A * t2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AssembleAprfm, SerialAndParallelBitIdentical) {
  // Oversubscribe so the parallel path really splits work on small hosts.
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const auto spec = problems::catalog(ProblemId::ex4, 0.01);
  const auto m = oracle::make_models(spec, 8, 8, {1, 1}, 2);
  const auto rule = quadrature::angular_rule(2, 16);
  const auto colloc = collocation::make_collocation(spec, {8, 8}, 8);
  AssemblyOptions serial;
  serial.execution = Execution::serial;
  const auto a = assemble_aprfm(spec, m.rho, m.g, colloc, rule, serial);
  const auto b = assemble_aprfm(spec, m.rho, m.g, colloc, rule);
  EXPECT_TRUE(a.A == b.A);
  EXPECT_TRUE(a.b == b.b);
  const auto f = oracle::make_phase_model(spec, 16, {1, 1, 2});
  EXPECT_TRUE(assemble_rfm(spec, f, colloc, rule, serial).A == assemble_rfm(spec, f, colloc, rule).A);
  omp_set_num_threads(saved);
}

TEST(AssembleAprfm, MismatchedModels) {
  const auto spec = problems::catalog(ProblemId::ex1, 0.1);
  const auto m = oracle::make_models(spec, 4, 4, {1}, 1);
  const auto colloc = collocation::make_collocation(spec, {4, 1}, 4);
  const auto rule = quadrature::angular_rule(1, 8);
  EXPECT_THROW(assemble_aprfm(spec, m.g, m.rho, colloc, rule), Error);
  EXPECT_THROW(assemble_rfm(spec, m.rho, colloc, rule), Error);
  EXPECT_THROW(assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(2, 8)), Error);
}

TEST(AssembleAprfm, ZeroMeanRows) {
  const auto spec = problems::catalog(ProblemId::ex1, 0.1);
  const auto m = oracle::make_models(spec, 4, 4, {1}, 1);
  const auto colloc = collocation::make_collocation(spec, {4, 1}, 4);
  AssemblyOptions opt;
  opt.zero_mean_rows = true;
  const auto sys = assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(1, 8), opt);
  EXPECT_EQ(sys.rows(), static_cast<Eigen::Index>(2 * 16 + colloc.n_boundary() + 4));
  EXPECT_EQ(sys.row_kind.back(), RowKind::zero_mean);
  EXPECT_EQ(sys.A(sys.rows() - 1, 0), 0.0);
}

TEST(Rescale, Examples) {
  LinearSystem sys;
  sys.A.resize(2, 3);
  sys.A << 2, 4, -8, 0.5, 0.25, 0.1;
  sys.b = Eigen::Vector2d(16, 1);
  sys.lambda = Eigen::Vector2d::Ones();
  sys.row_kind = {RowKind::micro, RowKind::boundary};
  const auto r = rescale_rows(sys);
  EXPECT_DOUBLE_EQ(r.A(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(r.A(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(r.A(0, 2), -1.0);
  EXPECT_DOUBLE_EQ(r.b(0), 2.0);
  EXPECT_DOUBLE_EQ(r.lambda(0), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(r.A.row(1).cwiseAbs().maxCoeff(), 1.0);
  const auto rr = rescale_rows(r);
  EXPECT_TRUE(rr.A == r.A);
  EXPECT_TRUE(rr.b == r.b);
  sys.A.row(1).setZero();
  try {
    rescale_rows(sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_row);
    EXPECT_NE(std::string(e.what()).find("row 1 (boundary)"), std::string::npos);
  }
}

TEST(Rescale, AssembledSystemsAndSolutionInvariance) {
  const auto spec = problems::catalog(ProblemId::ex1, 1e-4);
  const auto m = oracle::make_models(spec, 8, 8, {1}, 1);
  const auto colloc = collocation::make_collocation(spec, {16, 1}, 16);
  const auto sys = assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(1, 16));
  const auto r = rescale_rows(sys);
  for (Eigen::Index k = 0; k < r.rows(); ++k) EXPECT_DOUBLE_EQ(r.A.row(k).cwiseAbs().maxCoeff(), 1.0);
  const auto rr = rescale_rows(r);
  EXPECT_LE((rr.A - r.A).cwiseAbs().maxCoeff(), 1e-15);
  // A consistent system keeps its exact solution.
  const Eigen::VectorXd theta = Eigen::VectorXd::Random(sys.cols());
  LinearSystem consistent = sys;
  consistent.b = sys.A * theta;
  const auto sol = solve::lstsq(rescale_rows(consistent));
  EXPECT_LE((sol.coeffs - theta).norm() / theta.norm(), 1e-6);
}

TEST(Reconstruct, Cases) {
  const auto ex3 = problems::catalog(ProblemId::ex3, 1.0);
  const auto m = oracle::make_models(ex3, 4, 4, {1}, 1);
  const std::size_t z = m.rho.num_columns() + m.g.num_columns();
  const std::vector<double> zero(z, 0.0);
  EXPECT_EQ(reconstruct_f(ex3, m.rho, m.g, zero, {0.3, 0.0}, 0.2), 0.0);
  std::vector<double> c(z);
  for (std::size_t k = 0; k < z; ++k) c[k] = std::sin(1.0 + k);
  const Vec2 x{0.5, 0.0};
  const double rho = basis::model_eval(m.rho, std::span<const double>(c).subspan(0, 4), std::vector<double>{0.5});
  const double g = basis::model_eval(m.g, std::span<const double>(c).subspan(4), std::vector<double>{0.5, 0.2});
  EXPECT_NEAR(reconstruct_f(ex3, m.rho, m.g, c, x, 0.2) - rho, 0.77162 * g, 1e-4 * std::abs(g));
  EXPECT_NEAR(reconstruct_f(ex3, m.rho, m.g, c, x, 0.2) - rho, problems::epsilon_profile(0.5) * g, 1e-12);
  const auto ex1 = problems::catalog(ProblemId::ex1, 0.0);
  EXPECT_EQ(reconstruct_f(ex1, m.rho, m.g, c, x, 0.2), rho);
  EXPECT_THROW(reconstruct_f(ex1, m.rho, m.g, std::vector<double>(3, 0.0), x, 0.2), Error);
}

TEST(DebugDump, RoundTrip) {
  const auto spec = problems::catalog(ProblemId::ex1, 0.1);
  const auto m = oracle::make_models(spec, 4, 4, {1}, 1);
  const auto colloc = collocation::make_collocation(spec, {4, 1}, 4);
  const auto sys = rescale_rows(assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(1, 8)));
  const auto path = std::filesystem::temp_directory_path() / "aprfm_dump_test.bin";
  write_debug_dump(sys, path);
  EXPECT_EQ(std::filesystem::file_size(path),
            40u + 8u * static_cast<std::size_t>(sys.A.size() + 2 * sys.rows()) + static_cast<std::size_t>(sys.rows()));
  const auto back = read_debug_dump(path);
  EXPECT_TRUE(back.A == sys.A);
  EXPECT_TRUE(back.b == sys.b);
  EXPECT_TRUE(back.lambda == sys.lambda);
  EXPECT_EQ(back.row_kind, sys.row_kind);
  EXPECT_EQ(back.n_interior, sys.n_interior);
  EXPECT_EQ(back.n_boundary, sys.n_boundary);
  std::filesystem::remove(path);
}
