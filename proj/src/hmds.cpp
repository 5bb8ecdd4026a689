#include "hypembed/hmds.hpp"

#include <algorithm>
#include <type_traits>

#include "hypembed/eigen.hpp"
#include "hypembed/parallel.hpp"

namespace hypembed {

Recenter parse_recenter(const std::string& name) {
  if (name == "none") return Recenter::none;
  if (name == "karcher") return Recenter::karcher;
  if (name == "pseudo_euclidean" || name == "pseudo-euclidean") return Recenter::pseudo_euclidean;
  throw InputError("unknown recentering '" + name + "' (expected none, karcher or pseudo_euclidean)");
}

const char* recenter_name(Recenter r) {
  switch (r) {
    case Recenter::none:
      return "none";
    case Recenter::karcher:
      return "karcher";
    case Recenter::pseudo_euclidean:
      return "pseudo_euclidean";
  }
  return "none";
}

template <Real R>
SymMatrix<R> cosh_matrix(const DistanceMatrix<R>& d) {
  using std::cosh;
  if (!d.fully_observed()) {
    throw InputError("distance matrix has unobserved entries; complete it with shortest paths first");
  }
  const std::size_t n = d.size();
  SymMatrix<R> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y.set(i, i, R(1.0));
    for (std::size_t j = i + 1; j < n; ++j) y.set(i, j, cosh(d.d(i, j)));
  }
  return y;
}

template <Real R>
HmdsResult<R> run_hmds(const DistanceMatrix<R>& d, int r, HmdsOptions opts) {
  using std::sqrt;
  const std::size_t n = d.size();
  if (r < 1 || static_cast<std::size_t>(r) >= n) {
    throw InputError("rank must be between 1 and n - 1 = " + std::to_string(n > 0 ? n - 1 : 0));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d.d(i, i) == 0.0)) throw InputError("distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(d.d(i, j) == d.d(j, i)) || d.d(i, j) < 0.0) throw InputError("distance matrix must be symmetric and nonnegative");
  }
  double clamp = opts.clamp_tol;
  if (!(clamp > 0)) clamp = std::is_same_v<R, double> ? 1e-10 : RealTraits<R>::tol();

  const SymMatrix<R> y = cosh_matrix(d);
  Matrix<R> neg(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) neg(i, j) = -y(i, j);
  const auto eig = sym_eig(SymMatrix<R>(std::move(neg)), n);

  HmdsResult<R> res;
  res.eigenvalues = eig.values;
  const R lambda1 = eig.values[0];
  const R cut = lambda1 * clamp;
  const std::size_t rr = static_cast<std::size_t>(r);
  std::size_t negative = 0;
  for (const R& v : eig.values)
    if (v < -cut) ++negative;
  if (negative > 1) {
    res.warnings.push_back(std::to_string(negative) +
                           " significantly negative eigenvalues; the distances are not exactly realizable in "
                           "hyperbolic space at any rank");
  }

  res.x = Matrix<R>(n, rr);
  for (std::size_t k = 0; k < rr; ++k) {
    if (!(eig.values[k] > cut)) continue;
    ++res.kept;
    const R s = sqrt(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) res.x(i, k) = eig.vectors(i, k) * s;
  }
  res.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.u[i] = sqrt(norm2<R>(res.x.row(i)) + 1.0);
  res.centered_norm = centered_norm<R>(res.x, res.u);

  Matrix<R> z(n, rr);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = gans_to_poincare<R>(res.x.row(i));
    std::copy(p.begin(), p.end(), z.row(i).begin());
  }
  if (opts.recenter != Recenter::none) {
    const auto mean = opts.recenter == Recenter::karcher ? karcher_mean<R>(z) : pseudo_euclidean_mean<R>(z);
    z = translate_to_origin<R>(mean.point, z);
  }

  res.embedding.labels = d.labels;
  res.embedding.points = std::move(z);
  res.embedding.method = "hmds";
  res.embedding.scale = 1.0;
  res.embedding.precision = RealTraits<R>::bits();

  std::vector<double> row_err(n, 0.0);
  const auto& pts = res.embedding.points;
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      row_err[i] = std::max(row_err[i], std::abs(distance_double<R>(pts.row(i), pts.row(j)) - to_double(d.d(i, j))));
  });
  res.residual = R(*std::max_element(row_err.begin(), row_err.end()));
  return res;
}

template <Real R>
R perturbation_bound(const DistanceMatrix<R>& h, const R& delta_inf, const R& lambda_min) {
  using std::abs;
  using std::sinh;
  if (!(lambda_min > 0.0)) throw InputError("lambda_min must be positive");
  R h_inf(0.0);
  for (const R& v : h.d.data()) h_inf = std::max(h_inf, R(abs(v)));
  const double n = static_cast<double>(h.size());
  const R s = sinh(h_inf);
  return s * s * delta_inf * delta_inf * (2.0 * n * n) / lambda_min;
}

template <Real R>
R procrustes_gap(const Matrix<R>& x, const Matrix<R>& y) {
  using std::sqrt;
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw InputError("procrustes_gap: shape mismatch");
  const std::size_t r = x.cols();
  // Singular values of M = X^T Y from the eigenvalues of M^T M.
  Matrix<R> m(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t i = 0; i < x.rows(); ++i) m(a, b) += x(i, a) * y(i, b);
  Matrix<R> mtm(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = a; b < r; ++b) {
      R s(0.0);
      for (std::size_t k = 0; k < r; ++k) s += m(k, a) * m(k, b);
      mtm(a, b) = s;
      mtm(b, a) = s;
    }
  const auto eig = sym_eig(SymMatrix<R>(std::move(mtm)), r);
  R nuclear(0.0);
  for (const R& v : eig.values)
    if (v > 0.0) nuclear += sqrt(v);
  const R gap = frobenius_norm(x) * frobenius_norm(x) + frobenius_norm(y) * frobenius_norm(y) - nuclear * 2.0;
  return gap > 0.0 ? gap : R(0.0);
}

#define HYPEMBED_INSTANTIATE(R)                                                          \
  template SymMatrix<R> cosh_matrix<R>(const DistanceMatrix<R>&);                        \
  template HmdsResult<R> run_hmds<R>(const DistanceMatrix<R>&, int, HmdsOptions);        \
  template R perturbation_bound<R>(const DistanceMatrix<R>&, const R&, const R&);        \
  template R procrustes_gap<R>(const Matrix<R>&, const Matrix<R>&);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
