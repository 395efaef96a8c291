#ifndef STPG_ASSEMBLY_HPP
#define STPG_ASSEMBLY_HPP

// Assembly of the 1D operator matrices and the space-time systems.
//
// Storage convention used throughout: a Gram-type matrix G holds
// G(r,c) = (f_r, g_c) with the L2 inner product conjugate-linear in the
// SECOND slot.  All 1D factors are real, so only the complex space-time
// combinations care, but the convention decides which side the conjugate
// sits on and hence that coefficient systems solve G^T u = rhs (see
// linear_solve / the solver drivers).

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>

#include "stpg/errors.hpp"
#include "stpg/quadrature.hpp"
#include "stpg/spline_basis.hpp"

namespace stpg {

using cplx = std::complex<double>;

// V(t,x) = theta(t) * xi(x), both factors real-valued; boundedness is the
// caller's responsibility.
struct SeparablePotential {
  std::function<double(double)> theta;
  std::function<double(double)> xi;
  std::string descriptor;
};

// order+1 points integrates every free-particle matrix entry exactly
// (integrands are piecewise polynomials of degree <= 2*order-2).
inline QuadratureRule1D default_rule(int order_t, int order_x) {
  return QuadratureRule1D::gauss_legendre(std::max(order_t, order_x) + 1);
}

// General 1D operator matrix W(r,c) = integral weight * D^dr f_r * D^dc g_c
// over the common interval; the two spaces may live on different dyadic
// meshes (integration runs over the merged breakpoints).
inline Eigen::MatrixXd operator_matrix(const SplineSpace& rowspace, const SplineSpace& colspace,
                                       int der_row, int der_col, const QuadratureRule1D& rule,
                                       const std::function<double(double)>& weight = nullptr) {
  if (std::abs(rowspace.mesh.a - colspace.mesh.a) > 1e-14 ||
      std::abs(rowspace.mesh.b - colspace.mesh.b) > 1e-14)
    throw Error(ErrorCategory::Shape, "operator_matrix: spaces on different intervals");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(rowspace.dim, colspace.dim);
  Eigen::VectorXd pts, wts;
  // use the finer mesh's breakpoints plus the other's (they nest for dyadic
  // levels, but merging keeps this correct for any combination)
  const Mesh1D& fine =
      rowspace.mesh.level >= colspace.mesh.level ? rowspace.mesh : colspace.mesh;
  const Mesh1D& coarse =
      rowspace.mesh.level >= colspace.mesh.level ? colspace.mesh : rowspace.mesh;
  quadrature_grid(fine, rule, coarse.breakpoints, pts, wts);
  for (Eigen::Index q = 0; q < pts.size(); ++q) {
    const Eigen::VectorXd br = eval_basis(rowspace, pts(q), der_row);
    const Eigen::VectorXd bc = eval_basis(colspace, pts(q), der_col);
    const double w = weight ? wts(q) * weight(pts(q)) : wts(q);
    W.noalias() += w * br * bc.transpose();
  }
  return W;
}

struct OperatorBundle1D {
  SplineSpace tspace, xspace;
  QuadratureRule1D rule;

  Eigen::MatrixXd A_t;  // (rho_l', rho_k')
  Eigen::MatrixXd M_t;  // (rho_l , rho_k )
  Eigen::MatrixXd N_t;  // (rho_l', rho_k )
  Eigen::MatrixXd A_x;  // (phi_j'', phi_i'')
  Eigen::MatrixXd M_x;  // (phi_j  , phi_i  )
  Eigen::MatrixXd N_x;  // (phi_j'', phi_i  ) = -(grad,grad) stiffness

  bool has_potential = false;
  Eigen::MatrixXd Nt_w;   // (theta rho_l', rho_k)
  Eigen::MatrixXd Mt_w;   // (rho_l, theta rho_k)
  Eigen::MatrixXd Mt_ww;  // (theta rho_l, theta rho_k)
  Eigen::MatrixXd Mx_w;   // (xi phi_j, phi_i)
  Eigen::MatrixXd Nx_w;   // (phi_j'', xi phi_i)
  Eigen::MatrixXd Mx_ww;  // (xi phi_j, xi phi_i)
};

inline OperatorBundle1D assemble_bundle(const SplineSpace& tspace, const SplineSpace& xspace,
                                        const std::optional<SeparablePotential>& pot,
                                        const QuadratureRule1D& rule) {
  OperatorBundle1D b;
  b.tspace = tspace;
  b.xspace = xspace;
  b.rule = rule;
  b.A_t = operator_matrix(tspace, tspace, 1, 1, rule);
  b.M_t = operator_matrix(tspace, tspace, 0, 0, rule);
  b.N_t = operator_matrix(tspace, tspace, 1, 0, rule);
  b.A_x = operator_matrix(xspace, xspace, 2, 2, rule);
  b.M_x = operator_matrix(xspace, xspace, 0, 0, rule);
  b.N_x = operator_matrix(xspace, xspace, 2, 0, rule);
  if (pot) {
    b.has_potential = true;
    const auto& th = pot->theta;
    const auto& xi = pot->xi;
    b.Nt_w = operator_matrix(tspace, tspace, 1, 0, rule, th);
    b.Mt_w = operator_matrix(tspace, tspace, 0, 0, rule, th);
    b.Mt_ww = operator_matrix(tspace, tspace, 0, 0, rule,
                              [&th](double t) { return th(t) * th(t); });
    b.Mx_w = operator_matrix(xspace, xspace, 0, 0, rule, xi);
    b.Nx_w = operator_matrix(xspace, xspace, 2, 0, rule, xi);
    b.Mx_ww = operator_matrix(xspace, xspace, 0, 0, rule,
                              [&xi](double x) { return xi(x) * xi(x); });
  }
  return b;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

enum class SystemVariant { OptimalPetrovGalerkin, GeneralPair, GalerkinOnTestSpace };

// Index layout everywhere: time-major, row/col = k * N_x + i for temporal
// index k and spatial index i (0-based).
struct SpaceTimeSystem {
  Eigen::MatrixXcd S;
  Eigen::MatrixXd A_real;  // symmetric part source (real part of S)
  Eigen::MatrixXd B_imag;  // antisymmetric part source (imag part of S)
  Eigen::VectorXcd rhs;
  SplineSpace trial_t, trial_x;  // for the optimal pair these alias the test spaces
  SplineSpace test_t, test_x;
  SystemVariant variant = SystemVariant::OptimalPetrovGalerkin;
};

// Gram matrix of the images of the test basis under the adjoint operator
// L* v = i dt v + 1/2 dxx v - theta xi v, expanded into Kronecker products of
// the 1D factors.  The potential cross coupling enters as
// i * kron(Nt_w^T - Nt_w, Mx_w); the orientation is pinned by the
// brute-force quadrature oracle in the test suite (the assembled matrix must
// match direct integration of (L*phi_mu, L*phi_nu) entrywise).
inline SpaceTimeSystem assemble_optimal_system(const OperatorBundle1D& bundle,
                                               const std::optional<SeparablePotential>& pot) {
  if (pot && !bundle.has_potential)
    throw Error(ErrorCategory::IncompleteBundle,
                "potential given but bundle lacks weighted matrices");
  SpaceTimeSystem sys;
  sys.variant = SystemVariant::OptimalPetrovGalerkin;
  sys.trial_t = sys.test_t = bundle.tspace;
  sys.trial_x = sys.test_x = bundle.xspace;

  Eigen::MatrixXd re = kron(bundle.A_t, bundle.M_x) + 0.25 * kron(bundle.M_t, bundle.A_x);
  Eigen::MatrixXd im =
      0.5 * (kron(bundle.N_t, bundle.N_x.transpose()) - kron(bundle.N_t.transpose(), bundle.N_x));
  if (pot) {
    re += kron(bundle.Mt_ww, bundle.Mx_ww) -
          0.5 * kron(bundle.Mt_w, Eigen::MatrixXd(bundle.Nx_w + bundle.Nx_w.transpose()));
    im += kron(Eigen::MatrixXd(bundle.Nt_w.transpose() - bundle.Nt_w), bundle.Mx_w);
  }
  sys.A_real = std::move(re);
  sys.B_imag = std::move(im);
  sys.S = sys.A_real.cast<cplx>() + cplx(0.0, 1.0) * sys.B_imag.cast<cplx>();
  return sys;
}

// Discretization matrix for an arbitrary trial/test pair:
//   B[(l,j),(k,i)] = -i (sigma_l, rho_k') (xi_j, phi_i)
//                  + 1/2 (sigma_l, rho_k) (xi_j, phi_i'')
//                  - (theta sigma_l, rho_k)(xi xi_j, phi_i)
// rows indexed by the trial pair (l,j), columns by the test pair (k,i).
inline SpaceTimeSystem assemble_general_system(const SplineSpace& trial_t,
                                               const SplineSpace& trial_x,
                                               const SplineSpace& test_t,
                                               const SplineSpace& test_x,
                                               const std::optional<SeparablePotential>& pot,
                                               const QuadratureRule1D& rule) {
  if (test_t.constraint != Constraint::ZeroAtRight &&
      test_t.constraint != Constraint::ZeroBothEnds)
    throw Error(ErrorCategory::InvalidArgument,
                "test temporal space must vanish at the right endpoint");
  if (std::abs(trial_t.mesh.b - test_t.mesh.b) > 1e-14 ||
      std::abs(trial_x.mesh.b - test_x.mesh.b) > 1e-14)
    throw Error(ErrorCategory::Shape, "trial/test spaces on different domains");

  const Eigen::MatrixXd T10 = operator_matrix(trial_t, test_t, 0, 1, rule);
  const Eigen::MatrixXd T00 = operator_matrix(trial_t, test_t, 0, 0, rule);
  const Eigen::MatrixXd X00 = operator_matrix(trial_x, test_x, 0, 0, rule);
  const Eigen::MatrixXd X02 = operator_matrix(trial_x, test_x, 0, 2, rule);

  SpaceTimeSystem sys;
  sys.variant = SystemVariant::GeneralPair;
  sys.trial_t = trial_t;
  sys.trial_x = trial_x;
  sys.test_t = test_t;
  sys.test_x = test_x;
  Eigen::MatrixXd re = 0.5 * kron(T00, X02);
  Eigen::MatrixXd im = -kron(T10, X00);
  if (pot) {
    const Eigen::MatrixXd Tth = operator_matrix(trial_t, test_t, 0, 0, rule, pot->theta);
    const Eigen::MatrixXd Xxi = operator_matrix(trial_x, test_x, 0, 0, rule, pot->xi);
    re -= kron(Tth, Xxi);
  }
  sys.A_real = std::move(re);
  sys.B_imag = std::move(im);
  sys.S = sys.A_real.cast<cplx>() + cplx(0.0, 1.0) * sys.B_imag.cast<cplx>();
  return sys;
}

// Load vector over the test basis:
//   rhs[(k,i)] = Int g rho_k phi_i dt dx + i * rho_k(0) * Int u0 phi_i dx,
// with the u0 integral split at the listed discontinuities.
inline Eigen::VectorXcd assemble_rhs(const SplineSpace& test_t, const SplineSpace& test_x,
                                     const std::function<cplx(double, double)>& g,
                                     const std::function<cplx(double)>& u0,
                                     const std::vector<double>& u0_splits,
                                     const QuadratureRule1D& rule) {
  if (test_t.constraint != Constraint::ZeroAtRight &&
      test_t.constraint != Constraint::ZeroBothEnds)
    throw Error(ErrorCategory::InvalidArgument,
                "test temporal space must vanish at the right endpoint");
  const int Nt = test_t.dim, Nx = test_x.dim;
  Eigen::VectorXcd b0 = Eigen::VectorXcd::Zero(Nx);
  if (u0) {
    Eigen::VectorXd pts, wts;
    quadrature_grid(test_x.mesh, rule, u0_splits, pts, wts);
    for (Eigen::Index q = 0; q < pts.size(); ++q)
      b0 += (wts(q) * u0(pts(q))) * eval_basis(test_x, pts(q), 0).cast<cplx>();
  }
  const Eigen::VectorXd r0 = eval_basis(test_t, test_t.mesh.a, 0);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(Nt) * Nx);
  for (int k = 0; k < Nt; ++k)
    rhs.segment(static_cast<Eigen::Index>(k) * Nx, Nx) = cplx(0.0, 1.0) * r0(k) * b0;
  if (g) {
    Eigen::VectorXd tp, tw, xp, xw;
    quadrature_grid(test_t.mesh, rule, {}, tp, tw);
    quadrature_grid(test_x.mesh, rule, {}, xp, xw);
    const Eigen::MatrixXd R = basis_matrix(test_t, tp, 0);
    const Eigen::MatrixXd P = basis_matrix(test_x, xp, 0);
    Eigen::MatrixXcd G(tp.size(), xp.size());
    for (Eigen::Index i = 0; i < tp.size(); ++i)
      for (Eigen::Index j = 0; j < xp.size(); ++j)
        G(i, j) = tw(i) * xw(j) * g(tp(i), xp(j));
    const Eigen::MatrixXcd F = R.transpose().cast<cplx>() * G * P.cast<cplx>();  // Nt x Nx
    for (int k = 0; k < Nt; ++k)
      rhs.segment(static_cast<Eigen::Index>(k) * Nx, Nx) += F.row(k).transpose();
  }
  return rhs;
}

}  // namespace stpg

#endif  // STPG_ASSEMBLY_HPP
