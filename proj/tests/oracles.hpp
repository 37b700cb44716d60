#pragma once

// Independent reference routines used only by the tests.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aprfm/assemble.hpp"
#include "aprfm/basis.hpp"
#include "aprfm/collocation.hpp"
#include "aprfm/problems.hpp"
#include "aprfm/quadrature.hpp"

namespace oracle {

struct Svd {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;  // descending
  Eigen::MatrixXd V;
};

/// One-sided Jacobi SVD (Hestenes), thin factors. For small matrices only.
Svd jacobi_svd(const Eigen::MatrixXd& A);

/// Minimum-norm least-squares solution from the Jacobi SVD.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rel_tol = 1e-12);

/// Central difference of f along `dir` at y.
double central_difference(const std::function<double(std::span<const double>)>& f, std::span<const double> y,
                          std::span<const double> dir, double h = 1e-6);

/// (1/2pi) int_0^{2pi} h(a) da by an n-point midpoint sum.
double riemann_angular_average(const std::function<double(double)>& h, long n);

/// eps(x) profile evaluated in long double.
long double epsilon_profile_ld(long double x);

/// Interior rows of the eps -> 0 micro-macro system, built point by point:
///   macro  [sigma_a psi phi^rho | <v.grad (psi phi^g)>]
///   micro  [v.grad (psi phi^rho) | -sigma_s L (psi phi^g)]
Eigen::MatrixXd limit_interior_rows(const aprfm::problems::ProblemSpec& spec, const aprfm::basis::FeatureModel& rho,
                                    const aprfm::basis::FeatureModel& g,
                                    const std::vector<aprfm::collocation::PhasePoint>& points,
                                    const aprfm::quadrature::AngularRule& rule);

/// Value and spatial gradient of sum_c coeffs[c] * column_c of a model.
/// `phase` models take (x, v) input; the gradient covers x only.
aprfm::problems::FieldSample model_sample(const aprfm::basis::FeatureModel& model, std::span<const double> coeffs,
                                          const aprfm::problems::Vec2& x, double v, bool phase, int spatial_dim);

/// rho and g models on uniform partitions with tanh features and phi_b.
struct Models {
  aprfm::basis::FeatureModel rho;
  aprfm::basis::FeatureModel g;
};
Models make_models(const aprfm::problems::ProblemSpec& spec, int jr, int jg, std::vector<int> mx, int mv,
                   std::uint64_t seed = 1);
/// Single phase-space model on a uniform partition with the given counts.
aprfm::basis::FeatureModel make_phase_model(const aprfm::problems::ProblemSpec& spec, int j, std::vector<int> counts,
                                            std::uint64_t seed = 1);

}  // namespace oracle
