#ifndef STPG_LINEAR_SOLVE_HPP
#define STPG_LINEAR_SOLVE_HPP

// Direct dense solvers and eigenvalue kernels.
//
// Linear systems use LU with partial pivoting (sizes stay in the low
// thousands; no preconditioning anywhere).  Eigenvalue extremes go through
// LAPACK's divide-and-conquer Hermitian drivers, which are far faster than
// iterating at these sizes and give the full-accuracy extreme pair.

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "stpg/errors.hpp"

namespace stpg {

using cplx = std::complex<double>;

// Solution plus the certificate ||S u - g|| / ||g||; conditioning grows
// quadratically with refinement, so callers surface this in their records.
struct SolveResult {
  Eigen::VectorXcd x;
  double residual = 0.0;  // relative to ||g|| (absolute when g = 0)
};

namespace detail {

inline void check_square(const Eigen::MatrixXcd& S, const Eigen::VectorXcd& g) {
  if (S.rows() != S.cols())
    throw Error(ErrorCategory::Shape, "matrix not square: " + std::to_string(S.rows()) + "x" +
                                          std::to_string(S.cols()));
  if (S.cols() != g.size())
    throw Error(ErrorCategory::Shape, "rhs length mismatch");
}

inline double relative_residual(const Eigen::MatrixXcd& S, const Eigen::VectorXcd& x,
                                const Eigen::VectorXcd& g) {
  const double gn = g.norm();
  const double rn = (S * x - g).norm();
  return gn > 0.0 ? rn / gn : rn;
}

}  // namespace detail

inline SolveResult solve_complex(const Eigen::MatrixXcd& S, const Eigen::VectorXcd& g) {
  detail::check_square(S, g);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S);
  // partial-pivoted U factor: a collapsed diagonal flags numerical singularity
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  const double dmax = d.maxCoeff();
  Eigen::Index ipiv;
  const double dmin = d.minCoeff(&ipiv);
  if (dmax == 0.0 || dmin <= dmax * 1e-15 * static_cast<double>(S.rows()))
    throw Error(ErrorCategory::Factorization,
                "matrix singular to working precision (pivot " + std::to_string(ipiv) + " = " +
                    std::to_string(dmin) + ")");
  SolveResult r;
  r.x = lu.solve(g);
  r.residual = detail::relative_residual(S, r.x, g);
  return r;
}

// Same system solved over the reals via the 2N x 2N block form
// [[A, -B], [B, A]] (x; y) = (re g; im g), with S = A + iB, u = x + iy.
inline SolveResult solve_block_real(const Eigen::MatrixXcd& S, const Eigen::VectorXcd& g) {
  detail::check_square(S, g);
  const Eigen::Index n = S.rows();
  Eigen::MatrixXd M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = S.real();
  M.topRightCorner(n, n) = -S.imag();
  M.bottomLeftCorner(n, n) = S.imag();
  M.bottomRightCorner(n, n) = S.real();
  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = g.real();
  rhs.tail(n) = g.imag();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  const double dmax = d.maxCoeff();
  Eigen::Index ipiv;
  const double dmin = d.minCoeff(&ipiv);
  if (dmax == 0.0 || dmin <= dmax * 1e-15 * static_cast<double>(M.rows()))
    throw Error(ErrorCategory::Factorization,
                "block system singular to working precision (pivot " + std::to_string(ipiv) + ")");
  const Eigen::VectorXd xy = lu.solve(rhs);
  SolveResult r;
  r.x = xy.head(n) + cplx(0.0, 1.0) * xy.tail(n);
  r.residual = detail::relative_residual(S, r.x, g);
  return r;
}

namespace detail {

inline void require_hermitian(const Eigen::MatrixXcd& S, const char* who) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double dev = (S - S.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-10 * scale)
    throw Error(ErrorCategory::InvalidArgument,
                std::string(who) + ": matrix not Hermitian (max deviation " + std::to_string(dev) + ")");
}

}  // namespace detail

// (lambda_min, lambda_max) of a Hermitian matrix via zheevd.
inline std::pair<double, double> hermitian_eig_extremes(const Eigen::MatrixXcd& S) {
  if (S.rows() != S.cols()) throw Error(ErrorCategory::Shape, "eig: matrix not square");
  detail::require_hermitian(S, "hermitian_eig_extremes");
  const lapack_int n = static_cast<lapack_int>(S.rows());
  Eigen::MatrixXcd A = S;  // overwritten by LAPACK
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, A.data(), n, w.data());
  if (info != 0)
    throw Error(ErrorCategory::Factorization,
                "zheevd failed to converge (info " + std::to_string(info) + ")");
  return {w(0), w(n - 1)};
}

// Extreme eigenvalues of the pencil (A, B) with B Hermitian positive
// definite, via the Cholesky reduction inside zhegvd.
inline std::pair<double, double> generalized_sym_eig_extremes(const Eigen::MatrixXcd& A,
                                                              const Eigen::MatrixXcd& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw Error(ErrorCategory::Shape, "generalized eig: dimension mismatch");
  detail::require_hermitian(A, "generalized_sym_eig_extremes(A)");
  detail::require_hermitian(B, "generalized_sym_eig_extremes(B)");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXcd Ac = A, Bc = B;
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_zhegvd(LAPACK_COL_MAJOR, 1, 'N', 'L', n, Ac.data(), n, Bc.data(), n, w.data());
  if (info > n)
    throw Error(ErrorCategory::Definiteness,
                "pencil metric not positive definite (leading minor " + std::to_string(info - n) + ")");
  if (info != 0)
    throw Error(ErrorCategory::Factorization,
                "zhegvd failed to converge (info " + std::to_string(info) + ")");
  return {w(0), w(n - 1)};
}

}  // namespace stpg

#endif  // STPG_LINEAR_SOLVE_HPP
