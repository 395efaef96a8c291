#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "stpg/reference.hpp"

using stpg::Constraint;
using stpg::cplx;
using stpg::Mesh1D;
using stpg::ReferenceSolution;
using stpg::Scheme;
using stpg::SplineSpace;
using stpg::TimeStepperConfig;

namespace {

SplineSpace stepper_space(int level, int order) {
  return make_spline_space(Mesh1D::dyadic(0.0, 1.0, level), order, Constraint::ZeroBothEnds);
}

cplx sine_mode(double x) { return cplx(std::sin(M_PI * x), 0.0); }

}  // namespace

TEST(AnalyticSolution, SeparableForm) {
  // initial slice is the normalized sine, modulus is time invariant
  EXPECT_NEAR(std::abs(stpg::analytic_case_a(0.0, 0.5) - cplx(std::sqrt(2.0), 0.0)), 0.0, 1e-15);
  for (double t : {0.0, 0.3, 0.77, 1.0})
    EXPECT_NEAR(std::abs(stpg::analytic_case_a(t, 0.25)),
                std::sqrt(2.0) * std::sin(M_PI * 0.25), 1e-14);
  const cplx expect = std::sqrt(2.0) * std::exp(cplx(0.0, -M_PI * M_PI * 0.25));
  EXPECT_NEAR(std::abs(stpg::analytic_case_a(0.5, 0.5) - expect), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(stpg::analytic_case_a(0.2, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(stpg::analytic_case_a(0.2, 1.0)), 0.0, 1e-12);
}

// Trapezoidal stepping is a Cayley transform in the mass norm: the discrete
// L2 norm is preserved to roundoff over the whole trajectory.
TEST(Timestepper, TrapezoidalPreservesNorm) {
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.dt = 1.0 / 64.0;
  cfg.space = stepper_space(5, 3);
  const ReferenceSolution ref = stpg::run_timestepper(cfg, sine_mode, {});
  EXPECT_LE(ref.max_norm_drift, 1e-12);
  EXPECT_TRUE(ref.norm_monotone);
  // endpoint value close to the separable solution (up to dt^2 phase error
  // and the spatial projection error)
  const cplx got = ref.evaluate(1.0, 0.5);
  const cplx expect = stpg::analytic_case_a(1.0, 0.5) / std::sqrt(2.0);
  EXPECT_LE(std::abs(got - expect), 1e-2);
}

TEST(Timestepper, BackwardStepDampsMonotonically) {
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::ImplicitEuler;
  cfg.dt = 1.0 / 64.0;
  cfg.space = stepper_space(5, 3);
  const ReferenceSolution ref = stpg::run_timestepper(cfg, sine_mode, {});
  EXPECT_TRUE(ref.norm_monotone);
  EXPECT_GT(ref.max_norm_drift, 1e-3);  // visible damping at this step size
  // final norm strictly below the initial one
  Eigen::VectorXd xp(1);
  const double n0 = ref.coeffs_at(0.0).norm();
  const double nT = ref.coeffs_at(1.0).norm();
  EXPECT_LT(nT, n0);
}

TEST(Timestepper, ZeroInitialStateStaysZero) {
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.dt = 1.0 / 16.0;
  cfg.space = stepper_space(4, 3);
  const ReferenceSolution ref =
      stpg::run_timestepper(cfg, [](double) { return cplx(0.0, 0.0); }, {});
  EXPECT_LE(ref.states.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(ref.max_norm_drift, 1e-14);
}

TEST(Timestepper, SnapshotTimesAndInterpolation) {
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.dt = 1.0 / 8.0;
  cfg.store_stride = 1;
  cfg.space = stepper_space(3, 3);
  const ReferenceSolution ref = stpg::run_timestepper(cfg, sine_mode, {});
  ASSERT_EQ(ref.times.size(), 9);
  for (int s = 0; s <= 8; ++s) EXPECT_NEAR(ref.times(s), s / 8.0, 1e-15);
  // linear interpolation halfway between snapshots
  const Eigen::VectorXcd mid = ref.coeffs_at(3.0 / 16.0);
  const Eigen::VectorXcd avg = 0.5 * (ref.states.col(1) + ref.states.col(2));
  EXPECT_LE((mid - avg).norm(), 1e-14);
  // clamping outside the trajectory
  EXPECT_LE((ref.coeffs_at(-1.0) - ref.states.col(0)).norm(), 0.0);
  EXPECT_LE((ref.coeffs_at(2.0) - ref.states.col(8)).norm(), 0.0);
}

TEST(Timestepper, StrideKeepsEndpoints) {
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.dt = 1.0 / 100.0;
  cfg.store_stride = 7;  // does not divide 100: the final step is kept anyway
  cfg.space = stepper_space(3, 3);
  const ReferenceSolution ref = stpg::run_timestepper(cfg, sine_mode, {});
  EXPECT_NEAR(ref.times(0), 0.0, 0.0);
  EXPECT_NEAR(ref.times(ref.times.size() - 1), 1.0, 1e-15);
  for (Eigen::Index s = 1; s < ref.times.size(); ++s) EXPECT_GT(ref.times(s), ref.times(s - 1));
}

TEST(Timestepper, RejectsNonDividingStep) {
  TimeStepperConfig cfg;
  cfg.dt = 0.3;
  cfg.space = stepper_space(3, 3);
  try {
    stpg::run_timestepper(cfg, sine_mode, {});
    FAIL();
  } catch (const stpg::Error& e) {
    EXPECT_EQ(e.category(), stpg::ErrorCategory::InvalidArgument);
  }
}

TEST(Reference, SaveLoadRoundTrip) {
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.dt = 1.0 / 32.0;
  cfg.space = stepper_space(4, 3);
  const ReferenceSolution ref = stpg::run_timestepper(cfg, sine_mode, {});
  const std::string path = std::filesystem::temp_directory_path() / "stpg_ref_roundtrip.csv";
  stpg::save_reference(ref, path);
  const ReferenceSolution back = stpg::load_reference(path, cfg.space);
  ASSERT_EQ(back.times.size(), ref.times.size());
  for (Eigen::Index s = 0; s < ref.times.size(); ++s) {
    EXPECT_EQ(back.times(s), ref.times(s));
    EXPECT_LE((back.states.col(s) - ref.states.col(s)).cwiseAbs().maxCoeff(), 0.0);
  }
  std::filesystem::remove(path);

  // a trajectory saved on a different space is rejected as a shape mismatch
  try {
    stpg::save_reference(ref, path);
    stpg::load_reference(path, stepper_space(5, 3));
    FAIL();
  } catch (const stpg::Error& e) {
    EXPECT_EQ(e.category(), stpg::ErrorCategory::Shape);
  }
  std::filesystem::remove(path);
}

TEST(Reference, CachedRunUsesSavedTrajectory) {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "stpg_cache_test").string();
  std::filesystem::remove_all(dir);
  TimeStepperConfig cfg;
  cfg.scheme = Scheme::CrankNicolson;
  cfg.dt = 1.0 / 32.0;
  cfg.space = stepper_space(4, 3);
  const ReferenceSolution first = stpg::cached_timestepper(cfg, sine_mode, {}, dir);
  ASSERT_TRUE(std::filesystem::exists(dir));
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    ++files;
    EXPECT_TRUE(entry.path().filename().string().rfind("trajectory_", 0) == 0);
  }
  EXPECT_EQ(files, 1);
  const ReferenceSolution second = stpg::cached_timestepper(cfg, sine_mode, {}, dir);
  ASSERT_EQ(second.times.size(), first.times.size());
  EXPECT_LE((second.states - first.states).cwiseAbs().maxCoeff(), 0.0);
  // loaded trajectories carry no drift certificate
  EXPECT_TRUE(std::isnan(second.max_norm_drift));
  std::filesystem::remove_all(dir);
}

TEST(Reference, ConfigHashSeparatesConfigurations) {
  TimeStepperConfig a;
  a.space = stepper_space(4, 3);
  TimeStepperConfig b = a;
  EXPECT_EQ(stpg::config_hash(a), stpg::config_hash(b));
  b.dt = a.dt / 2;
  EXPECT_NE(stpg::config_hash(a), stpg::config_hash(b));
  TimeStepperConfig c = a;
  c.scheme = Scheme::CrankNicolson;
  EXPECT_NE(stpg::config_hash(a), stpg::config_hash(c));
  TimeStepperConfig d = a;
  d.space = stepper_space(5, 3);
  EXPECT_NE(stpg::config_hash(a), stpg::config_hash(d));
}
