#include "aprfm/solve.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "aprfm/error.hpp"

namespace aprfm::solve {

namespace detail {

void check_matrix(Eigen::Index rows, Eigen::Index cols, const double* data, Eigen::Index size, const Eigen::VectorXd& b) {
  if (rows == 0 || cols == 0) fail(ErrorKind::invalid_argument, "least-squares system has no rows or no columns");
  if (b.size() != rows) fail(ErrorKind::invalid_argument, "right-hand side length does not match the matrix");
  for (Eigen::Index k = 0; k < size; ++k) {
    if (!std::isfinite(data[k])) fail(ErrorKind::invalid_input, "matrix has a non-finite entry");
  }
  if (!b.allFinite()) fail(ErrorKind::invalid_input, "right-hand side has a non-finite entry");
}

namespace {

using Svd = Eigen::BDCSVD<Eigen::MatrixXd>;

void from_svd(const Svd& svd, const Eigen::VectorXd& rhs, double rank_tol, SolveReport& report) {
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rank_tol * s(0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  report.rank = rank;
  if (rank == 0) {
    report.coeffs = Eigen::VectorXd::Zero(svd.matrixV().rows());
    report.condition_estimate = std::numeric_limits<double>::infinity();
    return;
  }
  const Eigen::VectorXd projected = svd.matrixU().leftCols(rank).transpose() * rhs;
  report.coeffs = svd.matrixV().leftCols(rank) * projected.cwiseQuotient(s.head(rank));
  report.condition_estimate = s(0) / s(rank - 1);
}

// Tall systems: A = QR, then R = U S V^T, so A = (QU) S V^T is an SVD of A
// and theta = V S^+ U^T Q^T b is the minimum-norm minimizer.
template <class Matrix>
void solve_svd(const Matrix& A, const Eigen::VectorXd& b, double rank_tol, SolveReport& report) {
  const Eigen::Index z = A.cols();
  if (A.rows() >= z) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd qtb = b;
    qtb.applyOnTheLeft(qr.householderQ().adjoint());
    const Eigen::MatrixXd R = qr.matrixQR().topRows(z).template triangularView<Eigen::Upper>();
    const Svd svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    from_svd(svd, qtb.head(z), rank_tol, report);
  } else {
    const Svd svd(Eigen::MatrixXd(A), Eigen::ComputeThinU | Eigen::ComputeThinV);
    from_svd(svd, b, rank_tol, report);
  }
}

// Column-pivoted complete orthogonal factorization; false when rank deficient.
template <class Matrix>
bool solve_qr(const Matrix& A, const Eigen::VectorXd& b, double rank_tol, SolveReport& report) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(rank_tol);
  cod.compute(A);
  const Eigen::Index rank = cod.rank();
  if (rank < std::min(A.rows(), A.cols())) return false;
  report.coeffs = cod.solve(b);
  report.rank = rank;
  const Eigen::VectorXd d = cod.matrixT().diagonal().head(rank).cwiseAbs();
  report.condition_estimate = d.maxCoeff() / d.minCoeff();
  return true;
}

template <class Matrix>
SolveReport run(const Matrix& A, const Eigen::VectorXd& b, const SolveOptions& options) {
  check_matrix(A.rows(), A.cols(), A.data(), A.size(), b);
  if (!(options.rank_tol > 0.0 && options.rank_tol < 1.0)) fail(ErrorKind::invalid_argument, "rank_tol must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  bool done = false;
  if (options.method == SolveMethod::qr) {
    done = solve_qr(A, b, options.rank_tol, report);
    report.fell_back = !done;
  }
  if (!done) solve_svd(A, b, options.rank_tol, report);
  report.residual_norm = (A * report.coeffs - b).norm();
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

SolveReport lstsq_colmajor(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolveOptions& options) {
  return run(A, b, options);
}

}  // namespace detail

SolveReport lstsq(const assemble::LinearSystem& sys, const SolveOptions& options) {
  return detail::run(sys.A, sys.b, options);
}

namespace {

// BDCSVD deflates tiny singular values to exact zeros; one-sided Jacobi keeps
// them to high relative accuracy, which is what a condition number needs.
Eigen::VectorXd small_singular_values(const Eigen::MatrixXd& M) {
  if (M.cols() <= 1024) return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  return Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues();
}

template <class Matrix>
double condition_of(const Matrix& A) {
  detail::check_matrix(A.rows(), A.cols(), A.data(), A.size(), Eigen::VectorXd::Zero(A.rows()));
  Eigen::VectorXd s;
  if (A.rows() > A.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(A.cols()).template triangularView<Eigen::Upper>();
    s = small_singular_values(R);
  } else {
    s = small_singular_values(Eigen::MatrixXd(A));
  }
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace

double condition_report(const Eigen::MatrixXd& A) { return condition_of(A); }

double condition_report(const assemble::LinearSystem& sys) { return condition_of(sys.A); }

}  // namespace aprfm::solve
