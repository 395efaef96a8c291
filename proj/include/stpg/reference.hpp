#ifndef STPG_REFERENCE_HPP
#define STPG_REFERENCE_HPP

// Ground-truth providers: the closed-form separable solution for the
// sine initial state, and semi-discrete time-stepping on a fine spatial
// spline space (implicit Euler / Crank-Nicolson) for rough initial data.
// Trajectories are expensive (2^14 steps), so they serialize to CSV keyed by
// a content hash of the configuration.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cinttypes>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stpg/assembly.hpp"
#include "stpg/errors.hpp"
#include "stpg/solution_field.hpp"

namespace stpg {

inline cplx analytic_case_a(double t, double x) {
  return std::sqrt(2.0) * std::sin(M_PI * x) *
         std::exp(cplx(0.0, -0.5 * M_PI * M_PI * t));
}

enum class Scheme { ImplicitEuler, CrankNicolson };

struct TimeStepperConfig {
  Scheme scheme = Scheme::ImplicitEuler;
  double dt = 1.0 / 16384.0;
  SplineSpace space;            // fine spatial space the ODE system lives on
  std::optional<SeparablePotential> pot;
  double T = 1.0;
  int store_stride = 0;         // 0: auto, keep ~1024 snapshots
  int quad_points = 0;          // 0: order + 2
  bool report_progress = false;
};

struct ReferenceSolution {
  Eigen::VectorXd times;    // retained snapshot times, ascending, ends at T
  Eigen::MatrixXcd states;  // dim x n_snapshots coefficient columns
  SplineSpace space;
  // stepping certificates (NaN when loaded from cache)
  double max_norm_drift = std::numeric_limits<double>::quiet_NaN();
  bool norm_monotone = true;

  // Coefficients at t by linear interpolation between snapshots.
  Eigen::VectorXcd coeffs_at(double t) const {
    const Eigen::Index n = times.size();
    if (n == 0) throw Error(ErrorCategory::InvalidArgument, "empty reference trajectory");
    if (t <= times(0)) return states.col(0);
    if (t >= times(n - 1)) return states.col(n - 1);
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Eigen::Index mid = (lo + hi) / 2;
      (times(mid) <= t ? lo : hi) = mid;
    }
    const double w = (t - times(lo)) / (times(hi) - times(lo));
    return (1.0 - w) * states.col(lo) + w * states.col(hi);
  }

  Eigen::MatrixXcd values_on_grid(const Eigen::VectorXd& tpts, const Eigen::VectorXd& xpts) const {
    const Eigen::SparseMatrix<double> X = collocation_matrix(space, xpts, 0);
    Eigen::MatrixXcd C(space.dim, tpts.size());
    for (Eigen::Index i = 0; i < tpts.size(); ++i) C.col(i) = coeffs_at(tpts(i));
    return (X.cast<cplx>() * C).transpose();  // rows: t, cols: x
  }

  cplx evaluate(double t, double x) const {
    Eigen::VectorXd tp(1), xp(1);
    tp << t;
    xp << x;
    return values_on_grid(tp, xp)(0, 0);
  }
};

namespace detail {

struct SemiDiscreteOperators {
  Eigen::SparseMatrix<double> M;       // (phi, phi)
  Eigen::SparseMatrix<double> Kstiff;  // 1/2 (phi', phi')
  Eigen::SparseMatrix<double> Kxi;     // (xi phi, phi), empty without potential
};

inline SemiDiscreteOperators spatial_operators(const SplineSpace& space,
                                               const std::optional<SeparablePotential>& pot,
                                               int quad_points) {
  const int nq = quad_points > 0 ? quad_points : space.order + 2;
  const QuadratureRule1D rule = QuadratureRule1D::gauss_legendre(nq);
  Eigen::VectorXd pts, wts;
  quadrature_grid(space.mesh, rule, {}, pts, wts);
  const Eigen::SparseMatrix<double> B0 = collocation_matrix(space, pts, 0);
  const Eigen::SparseMatrix<double> B1 = collocation_matrix(space, pts, 1);
  SemiDiscreteOperators ops;
  ops.M = B0.transpose() * wts.asDiagonal() * B0;
  ops.Kstiff = 0.5 * (B1.transpose() * wts.asDiagonal() * B1).eval();
  if (pot) {
    Eigen::VectorXd wxi = wts;
    for (Eigen::Index q = 0; q < pts.size(); ++q) wxi(q) *= pot->xi(pts(q));
    ops.Kxi = B0.transpose() * wxi.asDiagonal() * B0;
  }
  return ops;
}

}  // namespace detail

// Steps the semi-discrete system i M y' = K(t) y with
// K(t) = 1/2 stiffness + theta(t) * (xi phi, phi):
//   implicit Euler:  (iM - dt K) y+ = iM y        (M-norm non-increasing)
//   Crank-Nicolson:  (iM - dt/2 K) y+ = (iM + dt/2 K) y   (M-norm exact)
// y(0) is the L2 projection of u0 (quadrature split at its discontinuities).
inline ReferenceSolution run_timestepper(const TimeStepperConfig& cfg,
                                         const std::function<cplx(double)>& u0,
                                         const std::vector<double>& u0_splits) {
  if (!(cfg.dt > 0.0)) throw Error(ErrorCategory::InvalidArgument, "dt must be positive");
  const long long nsteps = std::llround(cfg.T / cfg.dt);
  if (nsteps < 1 || std::abs(nsteps * cfg.dt - cfg.T) > 1e-12 * cfg.T)
    throw Error(ErrorCategory::InvalidArgument, "dt must divide the final time exactly");

  const auto ops = detail::spatial_operators(cfg.space, cfg.pot, cfg.quad_points);
  const Eigen::Index dim = cfg.space.dim;

  // initial projection M y0 = (u0, phi)
  const int nq = cfg.quad_points > 0 ? cfg.quad_points : cfg.space.order + 2;
  const QuadratureRule1D rule = QuadratureRule1D::gauss_legendre(nq);
  Eigen::VectorXd pts, wts;
  quadrature_grid(cfg.space.mesh, rule, u0_splits, pts, wts);
  const Eigen::SparseMatrix<double> B0s = collocation_matrix(cfg.space, pts, 0);
  Eigen::VectorXcd f(pts.size());
  for (Eigen::Index q = 0; q < pts.size(); ++q) f(q) = wts(q) * u0(pts(q));
  const Eigen::VectorXcd load = B0s.transpose().cast<cplx>() * f;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass_chol(ops.M);
  if (mass_chol.info() != Eigen::Success)
    throw Error(ErrorCategory::Definiteness, "spatial mass matrix not positive definite");
  Eigen::VectorXcd y = mass_chol.solve(load.real()).cast<cplx>() +
                       cplx(0.0, 1.0) * mass_chol.solve(load.imag()).cast<cplx>();

  const long long stride =
      cfg.store_stride > 0 ? cfg.store_stride : std::max(1LL, nsteps / 1024);

  ReferenceSolution ref;
  ref.space = cfg.space;
  const Eigen::Index nstored =
      static_cast<Eigen::Index>(nsteps / stride) + ((nsteps % stride) ? 2 : 1);
  ref.times.resize(nstored);
  ref.states.resize(dim, nstored);
  Eigen::Index stored = 0;
  auto store = [&](long long step) {
    ref.times(stored) = step * cfg.dt;
    ref.states.col(stored) = y;
    ++stored;
  };
  store(0);

  const cplx iunit(0.0, 1.0);
  const Eigen::SparseMatrix<cplx> Mc = ops.M.cast<cplx>();
  const bool cn = (cfg.scheme == Scheme::CrankNicolson);

  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  Eigen::SparseMatrix<cplx> Kc;  // K at the cached theta value
  double theta_cached = std::numeric_limits<double>::quiet_NaN();
  bool factored = false;
  auto refactor = [&](double theta_val, long long step) {
    Kc = ops.Kstiff.cast<cplx>();
    if (cfg.pot) Kc += theta_val * ops.Kxi.cast<cplx>();
    Eigen::SparseMatrix<cplx> A = iunit * Mc - (cn ? 0.5 * cfg.dt : cfg.dt) * Kc;
    A.makeCompressed();
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorCategory::Factorization,
                  "singular step matrix at step " + std::to_string(step));
    theta_cached = theta_val;
    factored = true;
  };

  auto m_norm = [&](const Eigen::VectorXcd& v) {
    return std::sqrt(std::abs((v.adjoint() * (Mc * v))(0, 0).real()));
  };
  const double norm0 = m_norm(y);
  double prev_norm = norm0;
  ref.max_norm_drift = 0.0;
  ref.norm_monotone = true;

  for (long long n = 0; n < nsteps; ++n) {
    const double t_eval = cn ? (n + 0.5) * cfg.dt : (n + 1) * cfg.dt;
    const double theta_val = cfg.pot ? cfg.pot->theta(t_eval) : 0.0;
    if (!factored || theta_val != theta_cached) refactor(theta_val, n);

    Eigen::VectorXcd rhs = iunit * (Mc * y);
    if (cn) rhs += 0.5 * cfg.dt * (Kc * y);
    y = lu.solve(rhs);

    const double norm_n = m_norm(y);
    ref.max_norm_drift = std::max(ref.max_norm_drift, std::abs(norm_n - norm0));
    if (norm_n > prev_norm + 1e-12 * std::max(1.0, norm0)) ref.norm_monotone = false;
    prev_norm = norm_n;

    const bool at_stride = ((n + 1) % stride == 0), at_end = (n + 1 == nsteps);
    if ((at_stride || at_end) && ref.times(stored - 1) < (n + 1) * cfg.dt) store(n + 1);
    if (cfg.report_progress && nsteps >= 10 && (n + 1) % (nsteps / 10) == 0)
      std::fprintf(stderr, "  timestepper: %lld/%lld steps\n", n + 1, nsteps);
  }
  ref.times.conservativeResize(stored);
  ref.states.conservativeResize(dim, stored);
  return ref;
}

// L2(time x space) distance between a discrete solution and a stepped
// reference, integrated on the solution's time mesh tensorized with the
// finer of the two spatial meshes.
inline double l2_spacetime_error(const DiscreteSolution& sol, const ReferenceSolution& ref,
                                 const QuadratureRule1D& rule) {
  const Mesh1D& xmesh =
      ref.space.mesh.level > sol.xspace.mesh.level ? ref.space.mesh : sol.xspace.mesh;
  Eigen::VectorXd tp, tw, xp, xw;
  quadrature_grid(sol.tspace.mesh, rule, {}, tp, tw);
  quadrature_grid(xmesh, rule, {}, xp, xw);
  const Eigen::MatrixXcd V = values_on_grid(sol, tp, xp);
  const Eigen::MatrixXcd R = ref.values_on_grid(tp, xp);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < tp.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < xp.size(); ++j) row += xw(j) * std::norm(R(i, j) - V(i, j));
    acc += tw(i) * row;
  }
  return std::sqrt(acc);
}

// ---- trajectory cache ------------------------------------------------------

inline uint64_t config_hash(const TimeStepperConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d|%a|%d|%d|%s|%a|%a|%a|%d|%s",
                cfg.scheme == Scheme::CrankNicolson ? 1 : 0, cfg.dt, cfg.space.mesh.level,
                cfg.space.order, constraint_name(cfg.space.constraint), cfg.space.mesh.a,
                cfg.space.mesh.b, cfg.T, cfg.store_stride,
                cfg.pot ? cfg.pot->descriptor.c_str() : "-");
  // FNV-1a: stable across runs and platforms, unlike std::hash
  uint64_t h = 1469598103934665603ull;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  return h;
}

inline void save_reference(const ReferenceSolution& ref, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::Io, "cannot write " + path);
  const Eigen::Index dim = ref.states.rows(), n = ref.times.size();
  out << "# snapshots=" << n << " dim=" << dim << " level=" << ref.space.mesh.level
      << " order=" << ref.space.order << "\n";
  char num[32];
  for (Eigen::Index s = 0; s < n; ++s) {
    out << s;
    std::snprintf(num, sizeof num, ",%.17g", ref.times(s));
    out << num;
    for (Eigen::Index r = 0; r < dim; ++r) {
      std::snprintf(num, sizeof num, ",%.17g", ref.states(r, s).real());
      out << num;
      std::snprintf(num, sizeof num, ",%.17g", ref.states(r, s).imag());
      out << num;
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCategory::Io, "write failed for " + path);
}

inline ReferenceSolution load_reference(const std::string& path, const SplineSpace& space) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::Io, "cannot read " + path);
  std::string header;
  std::getline(in, header);
  long long n = 0, dim = 0;
  if (std::sscanf(header.c_str(), "# snapshots=%lld dim=%lld", &n, &dim) != 2)
    throw Error(ErrorCategory::Io, "malformed trajectory header in " + path);
  if (dim != space.dim)
    throw Error(ErrorCategory::Shape, "cached trajectory dimension mismatch");
  ReferenceSolution ref;
  ref.space = space;
  ref.times.resize(n);
  ref.states.resize(dim, n);
  std::string line;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (!std::getline(in, line)) throw Error(ErrorCategory::Io, "truncated trajectory " + path);
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');  // snapshot index, unused
    std::getline(ls, tok, ',');
    ref.times(s) = std::strtod(tok.c_str(), nullptr);
    for (Eigen::Index r = 0; r < dim; ++r) {
      std::getline(ls, tok, ',');
      const double re = std::strtod(tok.c_str(), nullptr);
      std::getline(ls, tok, ',');
      const double im = std::strtod(tok.c_str(), nullptr);
      ref.states(r, s) = cplx(re, im);
    }
  }
  return ref;
}

// Load the trajectory for cfg from cache_dir, or run the stepper and cache
// it.  The stepping run is the slow path and reports progress on stderr.
inline ReferenceSolution cached_timestepper(TimeStepperConfig cfg,
                                            const std::function<cplx(double)>& u0,
                                            const std::vector<double>& u0_splits,
                                            const std::string& cache_dir) {
  if (cache_dir.empty()) {
    cfg.report_progress = true;
    return run_timestepper(cfg, u0, u0_splits);
  }
  std::filesystem::create_directories(cache_dir);
  char name[64];
  std::snprintf(name, sizeof name, "trajectory_%016" PRIx64 ".csv", config_hash(cfg));
  const std::string path = (std::filesystem::path(cache_dir) / name).string();
  if (std::filesystem::exists(path)) return load_reference(path, cfg.space);
  std::fprintf(stderr, "reference trajectory not cached; running time stepper (%s)\n",
               name);
  cfg.report_progress = true;
  ReferenceSolution ref = run_timestepper(cfg, u0, u0_splits);
  save_reference(ref, path);
  return ref;
}

}  // namespace stpg

#endif  // STPG_REFERENCE_HPP
