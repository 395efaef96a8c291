#ifndef STPG_QUADRATURE_HPP
#define STPG_QUADRATURE_HPP

// Gauss-Legendre rules on the reference element [0,1], applied per mesh
// element.  integrate_1d accepts extra split points so integrands with known
// interior discontinuities (e.g. indicator initial data) keep full order.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

#include "stpg/errors.hpp"
#include "stpg/spline_basis.hpp"

namespace stpg {

struct QuadratureRule1D {
  Eigen::VectorXd nodes;    // on [0,1]
  Eigen::VectorXd weights;  // sum to 1
  int npoints = 0;

  // Nodes are the roots of the Legendre polynomial P_n on (-1,1), found by
  // Newton iteration from the Chebyshev-like initial guess, then mapped to
  // [0,1].  Exact for polynomials of degree <= 2n-1.
  static QuadratureRule1D gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorCategory::InvalidArgument, "quadrature needs >= 1 point");
    QuadratureRule1D r;
    r.npoints = n;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      // root of P_n in (-1,1), i-th from the right
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        // evaluate P_n and P_n' by the three-term recurrence
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.nodes(i) = 0.5 * (1.0 - x);  // note: reverses order; sorted ascending below
      r.weights(i) = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    // sort ascending for reproducible summation order
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return r.nodes(a) < r.nodes(b); });
    Eigen::VectorXd xs(n), ws(n);
    for (int i = 0; i < n; ++i) {
      xs(i) = r.nodes(idx[i]);
      ws(i) = r.weights(idx[i]);
    }
    r.nodes = xs;
    r.weights = ws;
    return r;
  }
};

namespace detail {

// Mesh breakpoints merged with interior split points, deduplicated.
inline std::vector<double> merged_breakpoints(const Mesh1D& mesh,
                                              const std::vector<double>& splits) {
  std::vector<double> pts = mesh.breakpoints;
  for (double s : splits) {
    if (s <= mesh.a || s >= mesh.b) continue;
    pts.push_back(s);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-14; }),
            pts.end());
  return pts;
}

}  // namespace detail

// Quadrature points and weights covering the whole mesh (optionally refined
// by split points), in ascending order.  Weights carry the element lengths.
inline void quadrature_grid(const Mesh1D& mesh, const QuadratureRule1D& rule,
                            const std::vector<double>& splits, Eigen::VectorXd& pts,
                            Eigen::VectorXd& wts) {
  const std::vector<double> edges = detail::merged_breakpoints(mesh, splits);
  const int nint = static_cast<int>(edges.size()) - 1;
  pts.resize(static_cast<Eigen::Index>(nint) * rule.npoints);
  wts.resize(pts.size());
  Eigen::Index q = 0;
  for (int e = 0; e < nint; ++e) {
    const double x0 = edges[e], len = edges[e + 1] - edges[e];
    for (int i = 0; i < rule.npoints; ++i, ++q) {
      pts(q) = x0 + len * rule.nodes(i);
      wts(q) = len * rule.weights(i);
    }
  }
}

template <typename F>
auto integrate_1d(F&& f, const Mesh1D& mesh, const QuadratureRule1D& rule,
                  const std::vector<double>& splits = {}) {
  using R = std::invoke_result_t<F, double>;
  Eigen::VectorXd pts, wts;
  quadrature_grid(mesh, rule, splits, pts, wts);
  R acc{};
  for (Eigen::Index q = 0; q < pts.size(); ++q) acc += wts(q) * f(pts(q));
  return acc;
}

template <typename F>
std::complex<double> integrate_spacetime(F&& f, const Mesh1D& tmesh, const Mesh1D& xmesh,
                                         const QuadratureRule1D& rule) {
  Eigen::VectorXd tp, tw, xp, xw;
  quadrature_grid(tmesh, rule, {}, tp, tw);
  quadrature_grid(xmesh, rule, {}, xp, xw);
  std::complex<double> acc{};
  for (Eigen::Index i = 0; i < tp.size(); ++i) {
    std::complex<double> row{};
    for (Eigen::Index j = 0; j < xp.size(); ++j)
      row += xw(j) * std::complex<double>(f(tp(i), xp(j)));
    acc += tw(i) * row;
  }
  return acc;
}

}  // namespace stpg

#endif  // STPG_QUADRATURE_HPP
