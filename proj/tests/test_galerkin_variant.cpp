#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "stpg/galerkin_variant.hpp"
#include "stpg/reference.hpp"

using stpg::cplx;
using stpg::Constraint;
using stpg::QuadratureRule1D;
using stpg::SplineSpace;

namespace {

cplx u0_case_a(double x) { return {std::sqrt(2.0) * std::sin(M_PI * x), 0.0}; }

// L2(Omega) norm of the datum's projection onto the spatial spline space:
// solve M y = b and take sqrt(y^H b).
double projected_datum_norm(const SplineSpace& xs, const QuadratureRule1D& rule) {
  const Eigen::MatrixXd M = stpg::operator_matrix(xs, xs, 0, 0, rule);
  Eigen::VectorXd pts, wts;
  stpg::quadrature_grid(xs.mesh, rule, {}, pts, wts);
  const Eigen::MatrixXd B0 = stpg::basis_matrix(xs, pts, 0);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(xs.dim);
  for (Eigen::Index q = 0; q < pts.size(); ++q)
    b += wts(q) * u0_case_a(pts(q)) * B0.row(q).transpose().cast<cplx>();
  const Eigen::VectorXcd y = stpg::solve_complex(M.cast<cplx>(), b).x;
  return std::sqrt(std::abs((y.adjoint() * b)(0, 0)));
}

stpg::DiscreteSolution solve_case_a(int level, bool constrained) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const SplineSpace ts = stpg::make_temporal_space(level, 3, 1.0);
  const SplineSpace xs = stpg::make_spatial_space(level, 4, 1.0);
  return stpg::solve_galerkin(ts, xs, std::nullopt, u0_case_a, {}, constrained, rule);
}

}  // namespace

TEST(Galerkin, ZeroDatumGivesZeroSolution) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const SplineSpace ts = stpg::make_temporal_space(2, 3, 1.0);
  const SplineSpace xs = stpg::make_spatial_space(2, 4, 1.0);
  auto zero = [](double) { return cplx(0.0, 0.0); };
  for (bool flag : {false, true}) {
    const auto sol = stpg::solve_galerkin(ts, xs, std::nullopt, zero, {}, flag, rule);
    EXPECT_LT(sol.coeffs.norm(), 1e-12);
  }
}

TEST(Galerkin, TrialSpaceFollowsConstraintFlag) {
  const auto free_end = solve_case_a(2, false);
  const auto pinned = solve_case_a(2, true);
  const SplineSpace test_t = stpg::make_temporal_space(2, 3, 1.0);

  EXPECT_EQ(free_end.tspace.constraint, Constraint::None);
  EXPECT_EQ(free_end.tspace.dim, test_t.dim + 1);
  EXPECT_EQ(free_end.representation, stpg::Representation::PlainTensor);

  EXPECT_EQ(pinned.tspace.constraint, Constraint::ZeroAtRight);
  EXPECT_EQ(pinned.tspace.dim, test_t.dim);
  // with the constraint on, every trial function vanishes at t = T
  for (double x : {0.1, 0.35, 0.62, 0.9})
    EXPECT_LT(std::abs(stpg::evaluate(pinned, 1.0, x)), 1e-13);
}

// Frozen space-time L2 errors against the separable exact solution of the
// free particle with u0 = sqrt(2) sin(pi x), minimum-norm solve, terminal
// constraint off.
TEST(Galerkin, FrozenCaseAErrors) {
  const QuadratureRule1D err_rule = QuadratureRule1D::gauss_legendre(6);
  const double expect[] = {2.43899091e-2, 4.54172216e-3, 6.29079423e-4};
  for (int level = 2; level <= 4; ++level) {
    const auto sol = solve_case_a(level, false);
    const double err = stpg::l2_spacetime_error(sol, stpg::analytic_case_a, err_rule);
    EXPECT_NEAR(err, expect[level - 2], 1e-5 * expect[level - 2]) << "level " << level;
  }
}

// With the terminal constraint off the discrete final value is free, and the
// solve does NOT preserve the H norm: the measured deviation between
// ||v(T)|| and the norm of the projected datum sits at 1e-4..1e-3, orders of
// magnitude above roundoff.  Frozen from an independent implementation.
TEST(Galerkin, FrozenTerminalNormDeviation) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const double expect[] = {9.34613066e-4, 1.13084005e-3, 1.64755800e-4};
  for (int level = 2; level <= 4; ++level) {
    const auto sol = solve_case_a(level, false);
    const double nT = stpg::spatial_norm(sol, 1.0, rule);
    const double n0 = projected_datum_norm(sol.xspace, rule);
    const double d = std::abs(nT - n0);
    EXPECT_NEAR(d, expect[level - 2], 1e-4 * expect[level - 2]) << "level " << level;
  }
}

// On the smooth case the plain Galerkin solve is more accurate per level
// than the ultra-weak solve on the same spatial mesh (frozen comparison at
// level 3): its temporal space has one extra order here.
TEST(Galerkin, MoreAccurateThanUltraWeakAtLevelThree) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const QuadratureRule1D err_rule = QuadratureRule1D::gauss_legendre(6);

  const auto gal = solve_case_a(3, false);
  const double err_gal = stpg::l2_spacetime_error(gal, stpg::analytic_case_a, err_rule);

  const SplineSpace ts = stpg::make_temporal_space(3, 3, 1.0);
  const SplineSpace xs = stpg::make_spatial_space(3, 4, 1.0);
  const auto bundle = stpg::assemble_bundle(ts, xs, std::nullopt, rule);
  const auto sys = stpg::assemble_optimal_system(bundle, std::nullopt);
  const Eigen::VectorXcd g = stpg::assemble_rhs(ts, xs, nullptr, u0_case_a, {}, rule);
  stpg::DiscreteSolution uw;
  uw.coeffs = stpg::solve_complex(sys.S.transpose(), g).x;
  uw.tspace = ts;
  uw.xspace = xs;
  uw.representation = stpg::Representation::TrialIsAdjointImage;
  const double err_uw = stpg::l2_spacetime_error(uw, stpg::analytic_case_a, err_rule);

  EXPECT_NEAR(err_uw, 6.68558191e-2, 1e-5 * 6.68558191e-2);
  EXPECT_LT(err_gal, err_uw);
}

// Inf-sup constant of the plain pair with trial = test = terminally
// constrained tensor space, measured in the graph norm on both sides.  The
// frozen values document the degeneracy: the constant collapses towards zero
// as the mesh refines instead of staying bounded below.
TEST(Galerkin, ConstrainedPairInfSupCollapses) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const double expect[] = {5.08763494e-3, 1.41561432e-3, 3.59389309e-4};
  double prev = 1.0;
  for (int level = 2; level <= 4; ++level) {
    const SplineSpace ts = stpg::make_temporal_space(level, 3, 1.0);
    const SplineSpace xs = stpg::make_spatial_space(level, 4, 1.0);
    const Eigen::MatrixXcd Bvv =
        stpg::assemble_general_system(ts, xs, ts, xs, std::nullopt, rule).S;
    const auto bundle = stpg::assemble_bundle(ts, xs, std::nullopt, rule);
    const Eigen::MatrixXcd S = stpg::assemble_optimal_system(bundle, std::nullopt).S;
    const double beta = stpg::infsup_constant(Bvv, S, S);
    EXPECT_NEAR(beta, expect[level - 2], 1e-4 * expect[level - 2]) << "level " << level;
    EXPECT_LT(beta, prev);
    prev = beta;
  }
}

TEST(Galerkin, StabilityErrorCarriesMeasurement) {
  try {
    throw stpg::StabilityError("pair too close to singular", 0.25);
  } catch (const stpg::StabilityError& e) {
    EXPECT_EQ(e.category(), stpg::ErrorCategory::Stability);
    EXPECT_DOUBLE_EQ(e.measured_eps(), 0.25);
    EXPECT_NE(std::string(e.what()).find("pair too close"), std::string::npos);
  }
}
