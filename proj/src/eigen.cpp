#include "hypembed/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hypembed/errors.hpp"

namespace hypembed {

namespace {

template <Real R>
R off_diagonal_norm(const Matrix<R>& a) {
  using std::sqrt;
  R s(0.0);
  for (std::size_t p = 0; p < a.rows(); ++p) {
    for (std::size_t q = p + 1; q < a.cols(); ++q) s += a(p, q) * a(p, q);
  }
  return sqrt(s * 2.0);
}

inline void swap_values(double& a, double& b) { std::swap(a, b); }
inline void swap_values(BigFloat& a, BigFloat& b) { swap(a, b); }

// Applies the plane rotation [c -s; s c] to the pair (x, y) in place.
template <Real R>
inline void rotate(R& x, R& y, const R& c, const R& s, R& t1, R& t2, R& t3) {
  t1 = x;
  t1 *= c;
  t2 = y;
  t2 *= s;
  t1 -= t2;  // c x - s y
  t3 = x;
  t3 *= s;
  t2 = y;
  t2 *= c;
  t3 += t2;  // s x + c y
  swap_values(x, t1);
  swap_values(y, t3);
}

}  // namespace

template <Real R>
EigenDecomposition<R> sym_eig(const SymMatrix<R>& m, std::size_t k, JacobiOptions opts) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = m.size();
  if (k > n) throw InputError("sym_eig: requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");

  Matrix<R> a = m.matrix();
  Matrix<R> v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = R(1.0);

  const double tol = opts.tol > 0 ? opts.tol : RealTraits<R>::tol();
  const R norm = frobenius_norm(a);
  const R target = norm * tol;
  // Rotations for entries this small cannot move the off-diagonal norm above
  // target / 2, so they are skipped.
  const R negligible = target / (2.0 * static_cast<double>(std::max<std::size_t>(n, 1)));

  R t1, t2, t3, theta, t, c, s, apq;
  int sweep = 0;
  bool converged = false;
  for (; sweep <= opts.max_sweeps; ++sweep) {
    if (!(off_diagonal_norm(a) > target)) {
      converged = true;
      break;
    }
    if (sweep == opts.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        apq = a(p, q);
        if (!(abs(apq) > negligible)) continue;
        theta = (a(q, q) - a(p, p)) / (apq * 2.0);
        t = 1.0 / (abs(theta) + sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        c = 1.0 / sqrt(t * t + 1.0);
        s = t * c;

        t1 = t * apq;
        a(p, p) -= t1;
        a(q, q) += t1;
        a(p, q) = R(0.0);
        a(q, p) = R(0.0);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          rotate(a(r, p), a(r, q), c, s, t1, t2, t3);
          a(p, r) = a(r, p);
          a(q, r) = a(r, q);
        }
        for (std::size_t r = 0; r < n; ++r) rotate(v(r, p), v(r, q), c, s, t1, t2, t3);
      }
    }
  }
  if (!converged) {
    throw NumericalError("sym_eig: Jacobi did not converge after " + std::to_string(opts.max_sweeps) +
                         " sweeps; off-diagonal residual " + format_real(to_double(off_diagonal_norm(a))) +
                         " vs target " + format_real(to_double(target)));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition<R> out;
  out.sweeps = sweep;
  out.values.reserve(k);
  out.vectors = Matrix<R>(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    out.values.push_back(a(order[j], order[j]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

template <Real R>
Eigenpair<R> top_eigenpair(const SymMatrix<R>& m, int max_iterations) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = m.size();
  if (n == 0) throw InputError("top_eigenpair: empty matrix");
  std::vector<R> v(n), w(n, R(0.0));
  // Slightly non-uniform start so it is not orthogonal to structured eigenvectors.
  R len(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = R(1.0 + 0.01 * static_cast<double>(i));
    len += v[i] * v[i];
  }
  len = sqrt(len);
  for (auto& x : v) x /= len;

  const double tol = RealTraits<R>::power_tol();
  R lambda(0.0), resid(0.0), t;
  for (int it = 1; it <= max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = R(0.0);
      for (std::size_t j = 0; j < n; ++j) {
        t = m(i, j);
        t *= v[j];
        w[i] += t;
      }
    }
    lambda = dot<R>(v, w);
    resid = R(0.0);
    R wn(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      t = w[i] - lambda * v[i];
      resid += t * t;
      wn += w[i] * w[i];
    }
    resid = sqrt(resid);
    if (!(resid > abs(lambda) * tol)) return {lambda, v, it};
    wn = sqrt(wn);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
  }
  throw NumericalError("top_eigenpair: no dominant eigenvalue after " + std::to_string(max_iterations) +
                       " iterations (residual " + format_real(to_double(resid)) + ", estimate " +
                       format_real(to_double(lambda)) + ")");
}

template <Real R>
R max_eigen_residual(const SymMatrix<R>& m, const EigenDecomposition<R>& e) {
  using std::sqrt;
  const std::size_t n = m.size();
  R worst(0.0);
  for (std::size_t j = 0; j < e.values.size(); ++j) {
    R s(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      R mv(0.0);
      for (std::size_t l = 0; l < n; ++l) mv += m(i, l) * e.vectors(l, j);
      mv -= e.values[j] * e.vectors(i, j);
      s += mv * mv;
    }
    s = sqrt(s);
    if (s > worst) worst = s;
  }
  return worst;
}

#define HYPEMBED_INSTANTIATE(R)                                                          \
  template EigenDecomposition<R> sym_eig<R>(const SymMatrix<R>&, std::size_t, JacobiOptions); \
  template Eigenpair<R> top_eigenpair<R>(const SymMatrix<R>&, int);                      \
  template R max_eigen_residual<R>(const SymMatrix<R>&, const EigenDecomposition<R>&);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
