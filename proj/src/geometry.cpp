#include "hypembed/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace hypembed {

namespace {

template <Real R>
double default_mean_tol() {
  if constexpr (std::is_same_v<R, double>) {
    return 1e-11;
  } else {
    return RealTraits<R>::tol();
  }
}

// Euclidean average of the Gans coordinates, mapped back into the ball.
template <Real R>
std::vector<R> gans_average(const Matrix<R>& pts) {
  const auto g = to_gans(pts);
  std::vector<R> avg(pts.cols(), R(0.0));
  for (std::size_t i = 0; i < pts.rows(); ++i)
    for (std::size_t j = 0; j < pts.cols(); ++j) avg[j] += g.x(i, j);
  for (auto& v : avg) v /= static_cast<double>(pts.rows());
  return gans_to_poincare<R>(avg);
}

template <Real R>
void check_points(const Matrix<R>& pts, const char* who) {
  if (pts.rows() == 0) throw InputError(std::string(who) + ": empty point set");
  for (std::size_t i = 0; i < pts.rows(); ++i) boundary_gap<R>(pts.row(i));
}

template <Real R>
R sum_sq_dist(std::span<const R> z, const Matrix<R>& pts) {
  R s(0.0), d;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    d = dist_poincare<R>(z, pts.row(i));
    s += d * d;
  }
  return s;
}

}  // namespace

template <Real R>
R centered_norm(const Matrix<R>& x, std::span<const R> u) {
  using std::sqrt;
  std::vector<R> xu(x.cols(), R(0.0));
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) xu[j] += x(i, j) * u[i];
  const R denom = frobenius_norm(x) * sqrt(norm2<R>(u));
  if (!(denom > 0.0)) return R(0.0);
  return sqrt(norm2<R>(xu)) / denom;
}

namespace {

// Sum of squared distances from the origin and the mean of the logarithms
// (Euclidean tangent units at 0) for points translated so the iterate is 0.
template <Real R>
std::pair<R, std::vector<R>> karcher_terms(const Matrix<R>& y, R* dsum = nullptr) {
  using std::atanh;
  using std::sqrt;
  const std::size_t n = y.rows(), r = y.cols();
  std::vector<R> m(r, R(0.0));
  R f(0.0), ds(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const R len = sqrt(norm2<R>(y.row(i)));
    if (len == 0.0) continue;
    const R half = atanh(len);
    f += half * half * 4.0;
    ds += half * 2.0;
    for (std::size_t j = 0; j < r; ++j) m[j] += y(i, j) * (half / len);
  }
  for (auto& v : m) v /= static_cast<double>(n);
  if (dsum) *dsum = ds;
  return {f, m};
}

}  // namespace

template <Real R>
MeanResult<R> karcher_mean(const Matrix<R>& pts, MeanOptions opts) {
  using std::sqrt;
  using std::tanh;
  check_points(pts, "karcher_mean");
  const double tol = opts.tol > 0 ? opts.tol : default_mean_tol<R>();
  const std::size_t n = pts.rows(), r = pts.cols();
  std::vector<R> c = gans_average(pts);
  R dsum;
  auto [f, m] = karcher_terms(translate_to_origin<R>(c, pts), &dsum);
  const double scale = std::max(1.0, to_double(dsum) / static_cast<double>(n));
  // Near the minimum f stops resolving progress; a step within the rounding
  // floor of f is accepted only if it shrinks the gradient.
  const double slack = 64 * RealTraits<R>::epsilon();
  double eta = 1.0;
  R grad = sqrt(norm2<R>(m)) * 4.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (!(grad > tol * scale)) return {c, grad, it};
    const R mlen = grad / 4.0;
    bool moved = false;
    for (eta = std::min(1.0, 2 * eta); eta > 1e-30; eta *= 0.5) {
      const R k = tanh(mlen * eta) / mlen;
      std::vector<R> s(r);
      for (std::size_t j = 0; j < r; ++j) s[j] = m[j] * k;
      std::vector<R> trial = translate_from_origin<R>(c, s);
      auto [ft, mt] = karcher_terms(translate_to_origin<R>(trial, pts));
      const R gt = sqrt(norm2<R>(mt)) * 4.0;
      const R noise = f * slack;
      const bool decrease = ft <= f - mlen * mlen * (1e-4 * eta * static_cast<double>(n)) && ft < f - noise;
      const bool settle = ft <= f + noise && gt < grad;
      if (decrease || settle) {
        c = std::move(trial);
        f = ft;
        m = std::move(mt);
        grad = gt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  throw NumericalError("karcher_mean did not converge; gradient norm " + format_real(to_double(grad)));
}

template <Real R>
MeanResult<R> pseudo_euclidean_mean(const Matrix<R>& pts, MeanOptions opts) {
  using std::sqrt;
  check_points(pts, "pseudo_euclidean_mean");
  const double tol = opts.tol > 0 ? opts.tol : default_mean_tol<R>();
  const std::size_t n = pts.rows(), r = pts.cols();
  std::vector<R> c = gans_average(pts);
  R res(0.0);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto g = to_gans(translate_to_origin<R>(c, pts));
    res = centered_norm<R>(g.x, g.u);
    // Near-coincident clusters make the relative measure meaningless, so the
    // stopping test uses max(||X||, 1).
    const R xn = frobenius_norm(g.x);
    const R floor_scale = xn > 1.0 ? R(1.0) : xn;
    if (!(res * floor_scale > tol)) return {c, res, it};

    // Descent direction X^T u, scaled by the diagonal part of the Hessian.
    std::vector<R> dir(r, R(0.0));
    R psi(0.0), uu(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < r; ++j) dir[j] += g.x(i, j) * g.u[i];
      psi += g.u[i] * g.u[i] - 1.0;
      uu += g.u[i] * g.u[i];
    }
    for (auto& v : dir) v /= uu;

    bool moved = false;
    for (double eta = 1.0; eta > 1e-30; eta *= 0.5) {
      std::vector<R> zbar(r);
      for (std::size_t j = 0; j < r; ++j) zbar[j] = dir[j] * eta;
      const R z0 = sqrt(norm2<R>(zbar) + 1.0);
      R trial(0.0), ch;
      for (std::size_t i = 0; i < n; ++i) {
        ch = z0 * g.u[i] - dot<R>(zbar, g.x.row(i));
        trial += ch * ch - 1.0;
      }
      if (trial <= psi * (1.0 + 64 * RealTraits<R>::epsilon())) {
        c = translate_from_origin<R>(c, gans_to_poincare<R>(zbar));
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  throw NumericalError("pseudo_euclidean_mean did not converge; centering residual " +
                       format_real(to_double(res)));
}

#define HYPEMBED_INSTANTIATE(R)                                                   \
  template R centered_norm<R>(const Matrix<R>&, std::span<const R>);              \
  template MeanResult<R> karcher_mean<R>(const Matrix<R>&, MeanOptions);          \
  template MeanResult<R> pseudo_euclidean_mean<R>(const Matrix<R>&, MeanOptions);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
