#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "aprfm/assemble.hpp"
#include "aprfm/error.hpp"
#include "aprfm/solve.hpp"
#include "oracles.hpp"

using namespace aprfm;
using solve::lstsq;
using solve::SolveMethod;
using solve::SolveOptions;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = d(rng);
  return a;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) { return random_matrix(n, 1, seed).col(0); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::io_failure;
}

}  // namespace

TEST(Lstsq, Identity) {
  const auto r = lstsq(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3));
  EXPECT_NEAR((r.coeffs - Eigen::Vector3d(1, 2, 3)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(r.residual_norm, 0.0, 1e-15);
  EXPECT_EQ(r.rank, 3);
  EXPECT_NEAR(r.condition_estimate, 1.0, 1e-15);
}

TEST(Lstsq, InconsistentRowsGiveMean) {
  const auto r = lstsq(Eigen::MatrixXd::Ones(2, 1), Eigen::Vector2d(0, 2));
  EXPECT_NEAR(r.coeffs(0), 1.0, 1e-15);
  EXPECT_NEAR(r.residual_norm, std::sqrt(2.0), 1e-14);
}

TEST(Lstsq, RankOneMinimumNorm) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(3, 2);
  const Eigen::Vector3d b(3, 3, 3);
  const auto r = lstsq(a, b);
  const Eigen::VectorXd ref = oracle::pinv_solve(a, b);
  EXPECT_NEAR(ref(0), 1.5, 1e-14);
  EXPECT_NEAR(ref(1), 1.5, 1e-14);
  EXPECT_NEAR((r.coeffs - ref).norm(), 0.0, 1e-12);
  EXPECT_EQ(r.rank, 1);
  const auto q = lstsq(a, b, {1e-12, SolveMethod::qr});
  EXPECT_TRUE(q.fell_back);
  EXPECT_NEAR((q.coeffs - ref).norm(), 0.0, 1e-12);
}

TEST(Lstsq, MinimumNormMatchesPseudoInverse) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    // Rank 6 product of 40x6 and 6x15 factors, plus a generic right-hand side.
    const Eigen::MatrixXd a = random_matrix(40, 6, seed) * random_matrix(6, 15, seed + 10);
    const Eigen::VectorXd b = random_vector(40, seed + 20);
    const auto r = lstsq(a, b, {1e-10, SolveMethod::svd});
    const Eigen::VectorXd ref = oracle::pinv_solve(a, b, 1e-10);
    EXPECT_EQ(r.rank, 6);
    EXPECT_NEAR(r.coeffs.norm(), ref.norm(), 1e-10);
    EXPECT_LE((r.coeffs - ref).norm(), 1e-10 * std::max(1.0, ref.norm()));
  }
}

TEST(Lstsq, NormalEquationsOptimality) {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    for (auto method : {SolveMethod::svd, SolveMethod::qr}) {
      const Eigen::MatrixXd a = random_matrix(300, 60, seed);
      const Eigen::VectorXd b = random_vector(300, seed + 1);
      const auto r = lstsq(a, b, {1e-12, method});
      const double opt = (a.transpose() * (a * r.coeffs - b)).norm();
      EXPECT_LE(opt, 1e-8 * a.norm() * b.norm());
      EXPECT_NEAR(r.residual_norm, (a * r.coeffs - b).norm(), 1e-12 * b.norm());
      EXPECT_FALSE(r.fell_back);
    }
  }
}

TEST(Lstsq, QrAgreesWithSvdOnFullRank) {
  const Eigen::MatrixXd a = random_matrix(120, 30, 9);
  const Eigen::VectorXd b = random_vector(120, 10);
  const auto s = lstsq(a, b);
  const auto q = lstsq(a, b, {1e-12, SolveMethod::qr});
  EXPECT_LE((s.coeffs - q.coeffs).norm(), 1e-10 * s.coeffs.norm());
}

TEST(Lstsq, DeterministicReplay) {
  const Eigen::MatrixXd a = random_matrix(500, 80, 11);
  const Eigen::VectorXd b = random_vector(500, 12);
  const auto r1 = lstsq(a, b);
  const auto r2 = lstsq(a, b);
  EXPECT_TRUE(r1.coeffs == r2.coeffs);
  EXPECT_EQ(r1.residual_norm, r2.residual_norm);
}

TEST(Lstsq, Errors) {
  EXPECT_EQ(kind_of([] { lstsq(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { lstsq(Eigen::MatrixXd(2, 0), Eigen::VectorXd(2)); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { lstsq(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd(3)); }), ErrorKind::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
  bad(1, 0) = std::nan("");
  EXPECT_EQ(kind_of([&] { lstsq(bad, Eigen::Vector2d(1, 1)); }), ErrorKind::invalid_input);
  bad(1, 0) = INFINITY;
  EXPECT_EQ(kind_of([&] { solve::condition_report(bad); }), ErrorKind::invalid_input);
  EXPECT_EQ(kind_of([] { lstsq(Eigen::MatrixXd::Ones(2, 2), Eigen::Vector2d(1, 1), {0.0, SolveMethod::svd}); }),
            ErrorKind::invalid_argument);
}

TEST(ConditionReport, Examples) {
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(20, 20, 13)).householderQ();
  EXPECT_NEAR(solve::condition_report(q), 1.0, 1e-12);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-8;
  EXPECT_NEAR(solve::condition_report(d), 1e8, 1e-4);
  EXPECT_GT(solve::condition_report(Eigen::MatrixXd::Ones(3, 2)), 1e15);
}

// The stored sources keep every row O(1), so rescaling changes the condition
// number only marginally here; it must stay finite and not degrade it.
TEST(ConditionReport, RescalingKeepsAprfmSystemConditioned) {
  const auto spec = problems::catalog(problems::ProblemId::ex1, 1e-8);
  const auto m = oracle::make_models(spec, 16, 16, {1}, 1);
  const auto colloc = collocation::make_collocation(spec, {32, 1}, 64);
  const auto sys = assemble::assemble_aprfm(spec, m.rho, m.g, colloc, quadrature::angular_rule(1, 16));
  const double raw = solve::condition_report(sys);
  const double scaled = solve::condition_report(assemble::rescale_rows(sys));
  EXPECT_TRUE(std::isfinite(scaled));
  EXPECT_LT(scaled, 1.05 * raw);
  RecordProperty("raw", std::to_string(raw));
  RecordProperty("scaled", std::to_string(scaled));
}
