#ifndef STPG_SPLINE_BASIS_HPP
#define STPG_SPLINE_BASIS_HPP

// 1D B-spline spaces on dyadic uniform meshes with clamped (open) knot
// vectors.  Endpoint constraints are imposed by dropping the boundary basis
// function(s); with clamped knots exactly one function is nonzero at each
// endpoint, so removal yields a basis of the constrained subspace.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <string>
#include <vector>

#include "stpg/errors.hpp"

namespace stpg {

struct Mesh1D {
  double a = 0.0;
  double b = 1.0;
  int level = 0;  // element size = (b-a) * 2^-level
  std::vector<double> breakpoints;

  static Mesh1D dyadic(double a, double b, int level) {
    if (level < 0 || !(b > a))
      throw Error(ErrorCategory::InvalidArgument, "mesh needs level >= 0 and b > a");
    Mesh1D m;
    m.a = a;
    m.b = b;
    m.level = level;
    const int n = 1 << level;
    m.breakpoints.resize(n + 1);
    for (int k = 0; k <= n; ++k)
      m.breakpoints[k] = a + (b - a) * (static_cast<double>(k) / n);
    m.breakpoints.front() = a;
    m.breakpoints.back() = b;
    return m;
  }

  int elements() const { return static_cast<int>(breakpoints.size()) - 1; }
  double h() const { return (b - a) / elements(); }
};

enum class Constraint { None, ZeroAtLeft, ZeroAtRight, ZeroBothEnds };

inline const char* constraint_name(Constraint c) {
  switch (c) {
    case Constraint::None: return "none";
    case Constraint::ZeroAtLeft: return "zero-left";
    case Constraint::ZeroAtRight: return "zero-right";
    case Constraint::ZeroBothEnds: return "zero-both";
  }
  return "?";
}

struct SplineSpace {
  Mesh1D mesh;
  int order = 2;  // polynomial degree + 1
  std::vector<double> knots;
  Constraint constraint = Constraint::None;
  int dim = 0;
  // Retained basis functions are the unconstrained ones with indices in
  // [offset, offset + dim); offset = 1 iff the left end is constrained.
  int offset = 0;
  int unconstrained_dim = 0;
};

inline SplineSpace make_spline_space(const Mesh1D& mesh, int order, Constraint c) {
  if (order < 2)
    throw Error(ErrorCategory::InvalidArgument, "invalid order " + std::to_string(order) + " (need >= 2)");
  SplineSpace s;
  s.mesh = mesh;
  s.order = order;
  s.constraint = c;
  const int nelem = mesh.elements();
  s.unconstrained_dim = nelem + order - 1;
  // clamped knots: each endpoint repeated `order` times, interior nodes once
  s.knots.reserve(s.unconstrained_dim + order);
  for (int i = 0; i < order; ++i) s.knots.push_back(mesh.a);
  for (int k = 1; k < nelem; ++k) s.knots.push_back(mesh.breakpoints[k]);
  for (int i = 0; i < order; ++i) s.knots.push_back(mesh.b);
  const bool left = (c == Constraint::ZeroAtLeft || c == Constraint::ZeroBothEnds);
  const bool right = (c == Constraint::ZeroAtRight || c == Constraint::ZeroBothEnds);
  s.offset = left ? 1 : 0;
  s.dim = s.unconstrained_dim - (left ? 1 : 0) - (right ? 1 : 0);
  if (s.dim <= 0)
    throw Error(ErrorCategory::InvalidArgument, "degenerate space: dim <= 0 after constraints");
  return s;
}

// Temporal space: vanishes at the right endpoint (terminal condition).
inline SplineSpace make_temporal_space(int level, int order, double T) {
  if (order < 2)
    throw Error(ErrorCategory::InvalidArgument, "temporal order must be >= 2, got " + std::to_string(order));
  if (level < 0)
    throw Error(ErrorCategory::InvalidArgument, "temporal level must be >= 0");
  return make_spline_space(Mesh1D::dyadic(0.0, T, level), order, Constraint::ZeroAtRight);
}

// Spatial space: homogeneous Dirichlet at both ends.  Order >= 3 keeps the
// second derivative an integrable piecewise polynomial.
inline SplineSpace make_spatial_space(int level, int order, double L) {
  if (order < 3)
    throw Error(ErrorCategory::InvalidArgument, "spatial order must be >= 3, got " + std::to_string(order));
  if (level < 1)
    throw Error(ErrorCategory::InvalidArgument, "spatial level must be >= 1");
  const int dim = (1 << level) + order - 3;
  if (dim <= 0)
    throw Error(ErrorCategory::InvalidArgument, "degenerate space: dim = " + std::to_string(dim));
  return make_spline_space(Mesh1D::dyadic(0.0, L, level), order, Constraint::ZeroBothEnds);
}

namespace detail {

// Element index containing x; right-continuous except at x = b (left limit),
// which removes the ambiguity of piecewise derivatives at shared knots.
inline int element_index(const Mesh1D& mesh, double x) {
  const int n = mesh.elements();
  int e = static_cast<int>(std::floor((x - mesh.a) / (mesh.b - mesh.a) * n));
  if (e < 0) e = 0;
  if (e >= n) e = n - 1;
  // guard against floating-point drift of the division above
  while (e > 0 && x < mesh.breakpoints[e]) --e;
  while (e + 1 < n && x >= mesh.breakpoints[e + 1]) ++e;
  return e;
}

// All derivatives 0..nder of the `order` B-splines that are nonzero on the
// knot span `span` at x, by the standard triangular recurrence with the
// derivative table built from inverted knot differences.
// ders(d, j) = d-th derivative of basis function (span - order + 1 + j).
inline void ders_basis_funs(const std::vector<double>& knots, int span, double x,
                            int degree, int nder, Eigen::MatrixXd& ders) {
  const int p = degree;
  Eigen::MatrixXd ndu(p + 1, p + 1);
  Eigen::VectorXd left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left(j) = x - knots[span + 1 - j];
    right(j) = knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right(r + 1) + left(j - r);  // knot difference
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right(r + 1) * temp;
      saved = left(j - r) * temp;
    }
    ndu(j, j) = saved;
  }
  ders.setZero(nder + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= nder; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= nder; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= (p - k);
  }
}

}  // namespace detail

// Values (derivative = 0) or derivative values of all retained basis
// functions at x, as a dense vector of length space.dim.
inline Eigen::VectorXd eval_basis(const SplineSpace& space, double x, int derivative) {
  if (x < space.mesh.a || x > space.mesh.b)
    throw Error(ErrorCategory::Domain,
                "point " + std::to_string(x) + " outside [" + std::to_string(space.mesh.a) +
                    "," + std::to_string(space.mesh.b) + "]");
  if (derivative < 0 || derivative > space.order - 1)
    throw Error(ErrorCategory::InvalidArgument,
                "unsupported derivative " + std::to_string(derivative) + " for order " +
                    std::to_string(space.order));
  const int p = space.order - 1;
  const int e = detail::element_index(space.mesh, x);
  const int span = e + space.order - 1;  // index into the clamped knot vector
  Eigen::MatrixXd ders;
  detail::ders_basis_funs(space.knots, span, x, p, derivative, ders);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(space.unconstrained_dim);
  const int first = span - p;
  for (int j = 0; j <= p; ++j) full(first + j) = ders(derivative, j);
  return full.segment(space.offset, space.dim);
}

// Dense collocation matrix (rows: points, cols: basis functions); intended
// for the modest dimensions used in assembly and plotting.
inline Eigen::MatrixXd basis_matrix(const SplineSpace& space, const Eigen::VectorXd& pts,
                                    int derivative) {
  Eigen::MatrixXd B(pts.size(), space.dim);
  for (Eigen::Index r = 0; r < pts.size(); ++r)
    B.row(r) = eval_basis(space, pts(r), derivative).transpose();
  return B;
}

// Sparse collocation matrix for large spaces (only `order` entries per row).
inline Eigen::SparseMatrix<double> collocation_matrix(const SplineSpace& space,
                                                      const Eigen::VectorXd& pts,
                                                      int derivative) {
  if (derivative < 0 || derivative > space.order - 1)
    throw Error(ErrorCategory::InvalidArgument, "unsupported derivative");
  const int p = space.order - 1;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(pts.size()) * space.order);
  Eigen::MatrixXd ders;
  for (Eigen::Index r = 0; r < pts.size(); ++r) {
    const double x = pts(r);
    if (x < space.mesh.a || x > space.mesh.b)
      throw Error(ErrorCategory::Domain, "collocation point outside interval");
    const int e = detail::element_index(space.mesh, x);
    const int span = e + space.order - 1;
    detail::ders_basis_funs(space.knots, span, x, p, derivative, ders);
    const int first = span - p;
    for (int j = 0; j <= p; ++j) {
      const int col = first + j - space.offset;
      if (col >= 0 && col < space.dim)
        trip.emplace_back(static_cast<int>(r), col, ders(derivative, j));
    }
  }
  Eigen::SparseMatrix<double> B(pts.size(), space.dim);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

}  // namespace stpg

#endif  // STPG_SPLINE_BASIS_HPP
