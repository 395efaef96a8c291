#ifndef STPG_DIAGNOSTICS_HPP
#define STPG_DIAGNOSTICS_HPP

// Stability and conditioning diagnostics: discrete inf-sup constants via
// symmetric-definite generalized eigenproblems, the worst-case relative
// distance between test and trial spaces, spectral condition numbers, and
// log-log rate fits.

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "stpg/assembly.hpp"
#include "stpg/errors.hpp"
#include "stpg/linear_solve.hpp"

namespace stpg {

struct StabilityReport {
  double beta_delta = 0.0;
  double kappa2 = 1.0;
  std::optional<double> eps_delta;
  double residual = 0.0;
  int N_t = 0, N_x = 0, N_total = 0;
  double wall_ms = 0.0;
  // kappa2 is computed from the complex Hermitian matrix (the real 2N block
  // form duplicates its spectrum and would report the same value).
  const char* kappa_source = "complex-hermitian";
};

// beta = sqrt(lambda_min) of the pencil (B^H M_test^{-1} B, M_trial).
// For the optimally stable pair all three arguments coincide with the
// system Gram matrix and the result is 1 by construction.
inline double infsup_constant(const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& M_trial,
                              const Eigen::MatrixXcd& M_test) {
  if (M_test.rows() != B.rows() || M_trial.rows() != B.cols() ||
      M_test.rows() != M_test.cols() || M_trial.rows() != M_trial.cols())
    throw Error(ErrorCategory::Shape, "infsup_constant: nonconforming dimensions");
  Eigen::LLT<Eigen::MatrixXcd> llt(M_test);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCategory::Definiteness, "test Gram matrix not positive definite");
  Eigen::MatrixXcd A = B.adjoint() * llt.solve(B);
  A = 0.5 * (A + A.adjoint()).eval();  // exact Hermitian symmetrization
  const auto [lmin, lmax] = generalized_sym_eig_extremes(A, M_trial);
  (void)lmax;
  return std::sqrt(std::max(lmin, 0.0));
}

// Worst-case distance from the test space to the trial space, measured in
// the test norm ||L* v||: sqrt(lambda_max) of
//   (G_VV - C^H M_U^{-1} C, M_V)
// with G_VV the plain L2 Gram of the test tensor basis, C the mixed Gram
// between trial (adjoint-image) and test bases, and M_U = M_V the system
// Gram.  This is the projection residual of each test function onto the
// trial space, relativized by the test norm.
inline double eps_delta(const SplineSpace& tspace, const SplineSpace& xspace,
                        const std::optional<SeparablePotential>& pot,
                        const QuadratureRule1D& rule) {
  const OperatorBundle1D b = assemble_bundle(tspace, xspace, pot, rule);
  const SpaceTimeSystem sys = assemble_optimal_system(b, pot);
  // mixed Gram (psi_mu, phi_nu): psi = i rho' phi + 1/2 rho phi'' - theta xi rho phi
  Eigen::MatrixXcd C = cplx(0.0, 1.0) * kron(b.N_t, b.M_x).cast<cplx>() +
                       0.5 * kron(b.M_t, b.N_x).cast<cplx>();
  if (pot) C -= kron(b.Mt_w, b.Mx_w).cast<cplx>();
  const Eigen::MatrixXcd GVV = kron(b.M_t, b.M_x).cast<cplx>();

  Eigen::LLT<Eigen::MatrixXcd> llt(sys.S);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCategory::Definiteness, "system Gram matrix not positive definite");
  Eigen::MatrixXcd A = GVV - C.adjoint() * llt.solve(C);
  A = 0.5 * (A + A.adjoint()).eval();
  const auto [lmin, lmax] = generalized_sym_eig_extremes(A, sys.S);
  (void)lmin;
  return std::sqrt(std::max(lmax, 0.0));
}

// Spectral condition number lambda_max / lambda_min of a Hermitian positive
// definite matrix.
inline double condition_number(const Eigen::MatrixXcd& S) {
  const auto [lmin, lmax] = hermitian_eig_extremes(S);
  if (lmin <= 0.0)
    throw Error(ErrorCategory::Definiteness,
                "condition_number: matrix not positive definite (lambda_min = " +
                    std::to_string(lmin) + ")");
  return lmax / lmin;
}

// Least-squares slope of log(err) against log(n).
inline double fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw Error(ErrorCategory::InvalidArgument, "fit_rate needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, err] : points) {
    if (!(n > 0.0) || !(err > 0.0))
      throw Error(ErrorCategory::InvalidArgument, "fit_rate needs positive coordinates");
    const double lx = std::log(n), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(points.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace stpg

#endif  // STPG_DIAGNOSTICS_HPP
