#pragma once

// Dense linear least squares min ||A theta - b||_2 with rank diagnostics.

#include <Eigen/Core>

#include "aprfm/assemble.hpp"

namespace aprfm::solve {

enum class SolveMethod { svd, qr };

struct SolveOptions {
  /// Singular values below rank_tol * sigma_max are treated as zero.
  double rank_tol = 1e-12;
  /// `qr` uses a column-pivoted complete orthogonal factorization and falls
  /// back to the SVD path when it detects rank deficiency.
  SolveMethod method = SolveMethod::svd;
};

struct SolveReport {
  Eigen::VectorXd coeffs;
  double residual_norm = 0.0;
  Eigen::Index rank = 0;
  double condition_estimate = 0.0;  // sigma_max / sigma_min over retained values
  double wall_time = 0.0;           // seconds
  bool fell_back = false;           // qr requested but svd used
};

template <class Derived>
SolveReport lstsq(const Eigen::MatrixBase<Derived>& A, const Eigen::VectorXd& b, const SolveOptions& options = {});

SolveReport lstsq(const assemble::LinearSystem& sys, const SolveOptions& options = {});

/// sigma_max / sigma_min of A without truncation (infinity if singular).
double condition_report(const Eigen::MatrixXd& A);
double condition_report(const assemble::LinearSystem& sys);

namespace detail {
SolveReport lstsq_colmajor(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolveOptions& options);
}  // namespace detail

template <class Derived>
SolveReport lstsq(const Eigen::MatrixBase<Derived>& A, const Eigen::VectorXd& b, const SolveOptions& options) {
  return detail::lstsq_colmajor(Eigen::MatrixXd(A), b, options);
}

}  // namespace aprfm::solve
