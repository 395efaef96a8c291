#ifndef STPG_SOLUTION_FIELD_HPP
#define STPG_SOLUTION_FIELD_HPP

// Discrete solution fields and their norms/errors.  Two representations:
//  - AdjointImage: coefficients multiply the images of the test tensor basis
//    under L* = i dt + 1/2 dxx - V, i.e. the actual trial functions of the
//    optimally stable pair;
//  - PlainTensor: coefficients multiply rho_k(t) phi_i(x) directly (used by
//    the plain Galerkin variant).

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>

#include "stpg/assembly.hpp"
#include "stpg/errors.hpp"
#include "stpg/quadrature.hpp"
#include "stpg/spline_basis.hpp"

namespace stpg {

enum class Representation { TrialIsAdjointImage, PlainTensor };

struct DiscreteSolution {
  Eigen::VectorXcd coeffs;  // time-major: index = k * N_x + i
  SplineSpace tspace, xspace;
  std::optional<SeparablePotential> pot;
  Representation representation = Representation::TrialIsAdjointImage;
};

namespace detail {

// View the time-major coefficient vector as an N_t x N_x matrix.
inline Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
coeff_matrix(const DiscreteSolution& sol) {
  return {sol.coeffs.data(), sol.tspace.dim, sol.xspace.dim};
}

}  // namespace detail

// Field values on the tensor grid tpts x xpts (rows: t, cols: x), evaluated
// with batched collocation products rather than per-point basis sums.
inline Eigen::MatrixXcd values_on_grid(const DiscreteSolution& sol, const Eigen::VectorXd& tpts,
                                       const Eigen::VectorXd& xpts) {
  const auto U = detail::coeff_matrix(sol);
  const Eigen::MatrixXd T0 = basis_matrix(sol.tspace, tpts, 0);
  const Eigen::MatrixXd X0 = basis_matrix(sol.xspace, xpts, 0);
  if (sol.representation == Representation::PlainTensor)
    return T0.cast<cplx>() * U * X0.transpose().cast<cplx>();
  const Eigen::MatrixXd T1 = basis_matrix(sol.tspace, tpts, 1);
  const Eigen::MatrixXd X2 = basis_matrix(sol.xspace, xpts, 2);
  Eigen::MatrixXcd V = cplx(0.0, 1.0) * (T1.cast<cplx>() * U * X0.transpose().cast<cplx>()) +
                       0.5 * (T0.cast<cplx>() * U * X2.transpose().cast<cplx>());
  if (sol.pot) {
    Eigen::VectorXd th(tpts.size()), xi(xpts.size());
    for (Eigen::Index i = 0; i < tpts.size(); ++i) th(i) = sol.pot->theta(tpts(i));
    for (Eigen::Index j = 0; j < xpts.size(); ++j) xi(j) = sol.pot->xi(xpts(j));
    const Eigen::MatrixXcd P = T0.cast<cplx>() * U * X0.transpose().cast<cplx>();
    V -= (th * xi.transpose()).cast<cplx>().cwiseProduct(P);
  }
  return V;
}

inline cplx evaluate(const DiscreteSolution& sol, double t, double x) {
  if (t < sol.tspace.mesh.a || t > sol.tspace.mesh.b || x < sol.xspace.mesh.a ||
      x > sol.xspace.mesh.b)
    throw Error(ErrorCategory::Domain, "evaluation point outside the space-time cylinder");
  Eigen::VectorXd tp(1), xp(1);
  tp << t;
  xp << x;
  return values_on_grid(sol, tp, xp)(0, 0);
}

// || u(t, .) ||_{L2} by element quadrature on the spatial mesh.
inline double spatial_norm(const DiscreteSolution& sol, double t, const QuadratureRule1D& rule) {
  Eigen::VectorXd xp, xw;
  quadrature_grid(sol.xspace.mesh, rule, {}, xp, xw);
  Eigen::VectorXd tp(1);
  tp << t;
  const Eigen::MatrixXcd V = values_on_grid(sol, tp, xp);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < xp.size(); ++j) acc += xw(j) * std::norm(V(0, j));
  return std::sqrt(acc);
}

// | ||u(T)|| - ||u(0)|| | : deviation from norm preservation across the slab.
inline double deviation_dT(const DiscreteSolution& sol, const QuadratureRule1D& rule) {
  const double n0 = spatial_norm(sol, sol.tspace.mesh.a, rule);
  const double nT = spatial_norm(sol, sol.tspace.mesh.b, rule);
  return std::abs(nT - n0);
}

// Squared-norm flavor of the same deviation; some estimates bound this one.
inline double deviation_dT_squared(const DiscreteSolution& sol, const QuadratureRule1D& rule) {
  const double n0 = spatial_norm(sol, sol.tspace.mesh.a, rule);
  const double nT = spatial_norm(sol, sol.tspace.mesh.b, rule);
  return std::abs(nT * nT - n0 * n0);
}

// || ref - u ||_{L2(time x space)} by tensor Gauss quadrature on the
// solution's meshes.  For comparisons against a semi-discrete reference use
// the overload in reference.hpp, which integrates on the finer spatial mesh.
inline double l2_spacetime_error(const DiscreteSolution& sol,
                                 const std::function<cplx(double, double)>& ref,
                                 const QuadratureRule1D& rule) {
  Eigen::VectorXd tp, tw, xp, xw;
  quadrature_grid(sol.tspace.mesh, rule, {}, tp, tw);
  quadrature_grid(sol.xspace.mesh, rule, {}, xp, xw);
  const Eigen::MatrixXcd V = values_on_grid(sol, tp, xp);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < tp.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < xp.size(); ++j)
      row += xw(j) * std::norm(ref(tp(i), xp(j)) - V(i, j));
    acc += tw(i) * row;
  }
  return std::sqrt(acc);
}

}  // namespace stpg

#endif  // STPG_SOLUTION_FIELD_HPP
