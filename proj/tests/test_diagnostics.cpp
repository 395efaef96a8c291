#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "stpg/assembly.hpp"
#include "stpg/diagnostics.hpp"

using stpg::cplx;
using stpg::QuadratureRule1D;
using stpg::SplineSpace;

namespace {

Eigen::MatrixXcd random_hpd(Eigen::Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = cplx(unif(rng), unif(rng));
  return A * A.adjoint() + static_cast<double>(n) * Eigen::MatrixXcd::Identity(n, n);
}

Eigen::MatrixXcd random_invertible(Eigen::Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXcd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) P(i, j) = cplx(unif(rng), unif(rng));
  return P + 3.0 * Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace

TEST(InfSup, IdentityMatrices) {
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(4, 4);
  EXPECT_NEAR(stpg::infsup_constant(I, I, I), 1.0, 1e-13);
}

TEST(InfSup, RectangularDiagonal) {
  // test dim 3, trial dim 2, smallest singular value 2
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(3, 2);
  B(0, 0) = 2.0;
  B(1, 1) = 3.0;
  const Eigen::MatrixXcd Mtest = Eigen::MatrixXcd::Identity(3, 3);
  const Eigen::MatrixXcd Mtrial = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_NEAR(stpg::infsup_constant(B, Mtrial, Mtest), 2.0, 1e-13);
}

TEST(InfSup, MetricScaling) {
  std::mt19937 rng(31);
  const Eigen::MatrixXcd B = random_invertible(5, rng);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(5, 5);
  const double beta = stpg::infsup_constant(B, I, I);
  EXPECT_NEAR(stpg::infsup_constant(B, 4.0 * I, I), beta / 2.0, 1e-12);
  EXPECT_NEAR(stpg::infsup_constant(B, I, 4.0 * I), beta / 2.0, 1e-12);
  EXPECT_NEAR(stpg::infsup_constant(2.0 * B, I, I), 2.0 * beta, 1e-12);
}

// The inf-sup constant is a property of the operator and the two inner
// products, not of the bases: any change of basis on either side must leave
// it invariant once the Gram matrices are transformed along.
TEST(InfSup, ChangeOfBasisInvariance) {
  std::mt19937 rng(20240818);
  const Eigen::Index n = 7, m = 5;  // test dim, trial dim
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXcd B(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) B(i, j) = cplx(unif(rng), unif(rng));
  const Eigen::MatrixXcd Mtest = random_hpd(n, rng);
  const Eigen::MatrixXcd Mtrial = random_hpd(m, rng);
  const double beta = stpg::infsup_constant(B, Mtrial, Mtest);

  const Eigen::MatrixXcd P = random_invertible(m, rng);  // trial basis change
  const Eigen::MatrixXcd Q = random_invertible(n, rng);  // test basis change
  const Eigen::MatrixXcd B2 = Q.adjoint() * B * P;
  const Eigen::MatrixXcd Mtest2 = Q.adjoint() * Mtest * Q;
  const Eigen::MatrixXcd Mtrial2 = P.adjoint() * Mtrial * P;
  EXPECT_NEAR(stpg::infsup_constant(B2, Mtrial2, Mtest2), beta, 1e-9 * std::max(1.0, beta));
}

// For the image trial space the system matrix is simultaneously the
// discretization matrix and both Gram matrices, which forces the constant
// to one on every ladder configuration.
TEST(InfSup, OptimalPairIsExactlyUnit) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const int configs[][2] = {{0, 1}, {1, 1}, {2, 2}, {3, 2}, {2, 3}};
  for (const auto& c : configs) {
    const SplineSpace ts = stpg::make_temporal_space(c[0], 3, 1.0);
    const SplineSpace xs = stpg::make_spatial_space(c[1], 4, 1.0);
    const auto bundle = stpg::assemble_bundle(ts, xs, std::nullopt, rule);
    const Eigen::MatrixXcd S = stpg::assemble_optimal_system(bundle, std::nullopt).S;
    EXPECT_NEAR(stpg::infsup_constant(S, S, S), 1.0, 1e-8)
        << "(jt, jx) = (" << c[0] << ", " << c[1] << ")";
  }
}

TEST(InfSup, ErrorsOnBadInputs) {
  const Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(3, 2);
  try {
    stpg::infsup_constant(B, Eigen::MatrixXcd::Identity(3, 3),
                          Eigen::MatrixXcd::Identity(3, 3));
    FAIL();
  } catch (const stpg::Error& e) {
    EXPECT_EQ(e.category(), stpg::ErrorCategory::Shape);
  }
  try {
    stpg::infsup_constant(B, Eigen::MatrixXcd::Identity(2, 2),
                          -Eigen::MatrixXcd::Identity(3, 3));
    FAIL();
  } catch (const stpg::Error& e) {
    EXPECT_EQ(e.category(), stpg::ErrorCategory::Definiteness);
  }
}

// Distance from the test space to the image trial space on the diagonal
// ladder, frozen from an independent implementation of the same pencil.
// Note the sequence is NOT monotone in the level: it dips at (3,3) and rises
// again at (4,4).
TEST(EpsDelta, FrozenLadderValues) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const double expect[] = {0.168069814937, 0.173327027859, 0.085567257993, 0.228933394050};
  double got[4];
  for (int j = 1; j <= 4; ++j) {
    const SplineSpace ts = stpg::make_temporal_space(j, 3, 1.0);
    const SplineSpace xs = stpg::make_spatial_space(j, 4, 1.0);
    got[j - 1] = stpg::eps_delta(ts, xs, std::nullopt, rule);
    EXPECT_NEAR(got[j - 1], expect[j - 1], 1e-9) << "level " << j;
  }
  EXPECT_GT(got[1], got[0]);
  EXPECT_LT(got[2], got[1]);
  EXPECT_GT(got[3], got[2]);
}

TEST(ConditionNumber, ClosedForms) {
  Eigen::MatrixXcd S(2, 2);
  S << cplx(2, 0), cplx(0, 1), cplx(0, -1), cplx(2, 0);
  EXPECT_NEAR(stpg::condition_number(S), 3.0, 1e-12);
  EXPECT_NEAR(stpg::condition_number(Eigen::MatrixXcd::Identity(5, 5)), 1.0, 1e-13);
  Eigen::MatrixXcd indef = Eigen::MatrixXcd::Identity(2, 2);
  indef(1, 1) = -1.0;
  try {
    stpg::condition_number(indef);
    FAIL();
  } catch (const stpg::Error& e) {
    EXPECT_EQ(e.category(), stpg::ErrorCategory::Definiteness);
  }
}

TEST(ConditionNumber, MatchesEigExtremesOnAssembledSystem) {
  const QuadratureRule1D rule = stpg::default_rule(3, 4);
  const SplineSpace ts = stpg::make_temporal_space(2, 3, 1.0);
  const SplineSpace xs = stpg::make_spatial_space(2, 4, 1.0);
  const auto bundle = stpg::assemble_bundle(ts, xs, std::nullopt, rule);
  const Eigen::MatrixXcd S = stpg::assemble_optimal_system(bundle, std::nullopt).S;
  const auto [lmin, lmax] = stpg::hermitian_eig_extremes(S);
  EXPECT_GT(lmin, 0.0);
  EXPECT_NEAR(stpg::condition_number(S), lmax / lmin, 1e-10 * lmax / lmin);
}

TEST(FitRate, ClosedForms) {
  std::vector<std::pair<double, double>> half;
  for (double n : {10.0, 40.0, 160.0, 640.0}) half.push_back({n, 3.0 * std::pow(n, -0.5)});
  EXPECT_NEAR(stpg::fit_rate(half), -0.5, 1e-12);

  std::vector<std::pair<double, double>> flat = {{10, 2.0}, {100, 2.0}, {1000, 2.0}};
  EXPECT_NEAR(stpg::fit_rate(flat), 0.0, 1e-12);

  std::vector<std::pair<double, double>> quad;
  for (double n : {8.0, 64.0, 512.0}) quad.push_back({n, 0.1 * n * n});
  EXPECT_NEAR(stpg::fit_rate(quad), 2.0, 1e-12);

  EXPECT_THROW(stpg::fit_rate({{10.0, 1.0}}), stpg::Error);
  EXPECT_THROW(stpg::fit_rate({{10.0, 1.0}, {20.0, -1.0}}), stpg::Error);
}
