#ifndef STPG_GALERKIN_VARIANT_HPP
#define STPG_GALERKIN_VARIANT_HPP

// Plain Galerkin discretization on the test space: find v in the tensor
// spline space with (v, L* w) = i (u0_proj, w(0)) for every test function w.
// The test temporal space always vanishes at the final time.  The trial
// temporal space is controlled by `terminal_constraint_on_trial`:
//  - on:  trial = test (square system); every trial function then vanishes
//         at t = T, which pins v(T) = 0 structurally;
//  - off (default): the trial temporal space drops the terminal constraint,
//         leaving the final value free.  That system is underdetermined by
//         exactly dim(spatial) columns; we return the minimum-norm solution
//         through the normal equations of the adjoint.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "stpg/assembly.hpp"
#include "stpg/diagnostics.hpp"
#include "stpg/errors.hpp"
#include "stpg/linear_solve.hpp"
#include "stpg/solution_field.hpp"

namespace stpg {

inline DiscreteSolution solve_galerkin(const SplineSpace& tspace_trial,
                                       const SplineSpace& xspace,
                                       const std::optional<SeparablePotential>& pot,
                                       const std::function<cplx(double)>& u0,
                                       const std::vector<double>& u0_splits,
                                       bool terminal_constraint_on_trial,
                                       const QuadratureRule1D& rule) {
  // trial temporal constraint is decided by the flag; the passed space
  // supplies level/order/domain
  const SplineSpace trial_t = make_spline_space(
      tspace_trial.mesh, tspace_trial.order,
      terminal_constraint_on_trial ? Constraint::ZeroAtRight : Constraint::None);
  const SplineSpace test_t =
      make_spline_space(tspace_trial.mesh, tspace_trial.order, Constraint::ZeroAtRight);

  const SpaceTimeSystem sys = assemble_general_system(trial_t, xspace, test_t, xspace, pot, rule);
  // rhs over the test basis; the spatial factor is the load vector of the
  // L2 projection of u0, so testing against u0_proj and u0 agree exactly
  const Eigen::VectorXcd rhs = assemble_rhs(test_t, xspace, nullptr, u0, u0_splits, rule);

  // Coefficient equations: with B(row = trial, col = test), the variational
  // statement reads B^T c = rhs.
  const Eigen::MatrixXcd A = sys.S.transpose();
  Eigen::VectorXcd c;
  try {
    if (A.rows() == A.cols()) {
      c = solve_complex(A, rhs).x;
    } else {
      // minimum-norm representative: c = A^H (A A^H)^{-1} rhs
      const Eigen::MatrixXcd AAH = A * A.adjoint();
      c = A.adjoint() * solve_complex(AAH, rhs).x;
    }
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Factorization) {
      // singular system: surface the measured trial/test distance, which is
      // what governs solvability of this pair
      const double eps = eps_delta(test_t, xspace, pot, rule);
      throw StabilityError("Galerkin system singular; measured eps_delta = " +
                               std::to_string(eps) + " (solvable requires < 0.5): " + e.what(),
                           eps);
    }
    throw;
  }

  DiscreteSolution sol;
  sol.coeffs = std::move(c);
  sol.tspace = trial_t;
  sol.xspace = xspace;
  sol.pot = pot;
  sol.representation = Representation::PlainTensor;
  return sol;
}

}  // namespace stpg

#endif  // STPG_GALERKIN_VARIANT_HPP
