#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hypembed/errors.hpp"
#include "hypembed/matrix.hpp"
#include "hypembed/real.hpp"

namespace hypembed {

template <Real R>
struct HyperboloidPoint {
  R x0;
  std::vector<R> xbar;
};

// 1 - ||x||^2, throwing NumericalError when x is not strictly inside the ball.
template <Real R>
R boundary_gap(std::span<const R> x) {
  R g = 1.0 - norm2<R>(x);
  if (!(g > 0.0)) throw NumericalError("point is not strictly inside the Poincare ball");
  return g;
}

// d_H(0, x) = log((1 + |x|) / (1 - |x|)).
template <Real R>
R dist_origin(std::span<const R> x) {
  using std::log1p;
  using std::sqrt;
  boundary_gap<R>(x);
  const R v = sqrt(norm2<R>(x));
  return log1p(v * 2.0 / (1.0 - v));
}

// 2 |x - y|^2 / ((1 - |x|^2)(1 - |y|^2)), so that d_H = acosh(1 + q).
template <Real R>
R poincare_q(std::span<const R> x, std::span<const R> y) {
  R diff(0.0), t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    t = x[i];
    t -= y[i];
    t *= t;
    diff += t;
  }
  diff *= 2.0;
  diff /= boundary_gap<R>(x) * boundary_gap<R>(y);
  return diff;
}

template <Real R>
R dist_poincare(std::span<const R> x, std::span<const R> y) {
  if (x.size() != y.size()) throw InputError("dist_poincare: dimension mismatch");
  bool x0 = true, y0 = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] == 0.0)) x0 = false;
    if (!(y[i] == 0.0)) y0 = false;
  }
  if (x0) return dist_origin<R>(y);
  if (y0) return dist_origin<R>(x);
  return acosh1p(poincare_q<R>(x, y));
}

template <Real R>
R dist_poincare(const std::vector<R>& x, const std::vector<R>& y) {
  return dist_poincare<R>(std::span<const R>(x), std::span<const R>(y));
}

template <Real R>
R dist_hyperboloid(const HyperboloidPoint<R>& x, const HyperboloidPoint<R>& y) {
  using std::abs;
  using std::sqrt;
  if (x.xbar.size() != y.xbar.size()) throw InputError("dist_hyperboloid: dimension mismatch");
  for (const auto* p : {&x, &y}) {
    const R expect = sqrt(norm2<R>(p->xbar) + 1.0);
    if (!(p->x0 > 0.0) || abs(p->x0 - expect) > expect * (RealTraits<R>::tol() * 1e3)) {
      throw InputError("point is not on the hyperboloid");
    }
  }
  return acosh_clamped(x.x0 * y.x0 - dot<R>(x.xbar, y.xbar));
}

template <Real R>
std::vector<R> to_poincare(const HyperboloidPoint<R>& h) {
  using std::sqrt;
  const R denom = sqrt(norm2<R>(h.xbar) + 1.0) + 1.0;
  std::vector<R> z(h.xbar.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = h.xbar[i] / denom;
  return z;
}

// Poincare coordinates from Gans coordinates xbar (x0 implied).
template <Real R>
std::vector<R> gans_to_poincare(std::span<const R> xbar) {
  using std::sqrt;
  const R denom = sqrt(norm2<R>(xbar) + 1.0) + 1.0;
  std::vector<R> z(xbar.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = xbar[i] / denom;
  return z;
}

template <Real R>
HyperboloidPoint<R> to_hyperboloid(std::span<const R> z) {
  const R gap = boundary_gap<R>(z);
  HyperboloidPoint<R> h{(2.0 - gap) / gap, std::vector<R>(z.size())};
  for (std::size_t i = 0; i < z.size(); ++i) h.xbar[i] = z[i] * 2.0 / gap;
  return h;
}

template <Real R>
HyperboloidPoint<R> to_hyperboloid(const std::vector<R>& z) {
  return to_hyperboloid<R>(std::span<const R>(z));
}

// Mobius addition a (+) x. For fixed a it is the ball isometry taking 0 to a.
template <Real R>
std::vector<R> mobius_add(std::span<const R> a, std::span<const R> x) {
  const R ax = dot<R>(a, x);
  const R aa = norm2<R>(a);
  const R xx = norm2<R>(x);
  const R ca = ax * 2.0 + xx + 1.0;
  const R cx = 1.0 - aa;
  const R den = ax * 2.0 + aa * xx + 1.0;
  std::vector<R> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (ca * a[i] + cx * x[i]) / den;
  return out;
}

// Isometry taking a to the origin: x -> (-a) (+) x.
template <Real R>
std::vector<R> translate_to_origin(std::span<const R> a, std::span<const R> x) {
  std::vector<R> neg(a.begin(), a.end());
  for (auto& v : neg) v = -v;
  return mobius_add<R>(neg, x);
}

// Inverse of translate_to_origin: y -> a (+) y.
template <Real R>
std::vector<R> translate_from_origin(std::span<const R> a, std::span<const R> y) {
  return mobius_add<R>(a, y);
}

// Row-wise versions over an n x r point matrix.
template <Real R>
Matrix<R> translate_to_origin(std::span<const R> a, const Matrix<R>& pts) {
  Matrix<R> out(pts.rows(), pts.cols());
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    auto y = translate_to_origin<R>(a, pts.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

template <Real R>
Matrix<R> translate_from_origin(std::span<const R> a, const Matrix<R>& pts) {
  Matrix<R> out(pts.rows(), pts.cols());
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    auto y = translate_from_origin<R>(a, pts.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

// Gans coordinates of every row plus u_i = sqrt(1 + |xbar_i|^2).
template <Real R>
struct GansCoords {
  Matrix<R> x;
  std::vector<R> u;
};

template <Real R>
GansCoords<R> to_gans(const Matrix<R>& pts) {
  GansCoords<R> g{Matrix<R>(pts.rows(), pts.cols()), std::vector<R>(pts.rows())};
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    auto h = to_hyperboloid<R>(pts.row(i));
    g.u[i] = h.x0;
    std::copy(h.xbar.begin(), h.xbar.end(), g.x.row(i).begin());
  }
  return g;
}

// ||X^T u|| / (||X||_F ||u||): zero exactly when the pseudo-Euclidean
// stationarity condition holds at the origin. Returns 0 if X = 0.
template <Real R>
R centered_norm(const Matrix<R>& x, std::span<const R> u);

struct MeanOptions {
  // Stationarity tolerance; <= 0 selects a precision-dependent default.
  double tol = 0.0;
  int max_iterations = 2000;
};

template <Real R>
struct MeanResult {
  std::vector<R> point;
  // Karcher: norm of the Riemannian gradient of (1/n) sum d^2.
  // Pseudo-Euclidean: centered_norm after translating the mean to 0.
  R residual;
  int iterations = 0;
};

// Local minimizer of sum_i d_H(z, x_i)^2 by Riemannian gradient descent,
// started at the Gans average. Throws NumericalError with the final gradient
// norm if it does not converge.
template <Real R>
MeanResult<R> karcher_mean(const Matrix<R>& pts, MeanOptions opts = {});

// Local minimizer of sum_i sinh^2 d_H(z, x_i). Converged when the translated
// configuration satisfies centered_norm <= tol.
template <Real R>
MeanResult<R> pseudo_euclidean_mean(const Matrix<R>& pts, MeanOptions opts = {});

}  // namespace hypembed
