#include "hypembed/pga.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hypembed/eigen.hpp"
#include "hypembed/parallel.hpp"

namespace hypembed {

namespace {

// |(I - u u^T) v|^2, summed componentwise to avoid cancellation.
template <Real R>
R residual_sq(std::span<const R> u, std::span<const R> v) {
  const R c = dot<R>(u, v);
  R t(0.0), e;
  for (std::size_t j = 0; j < v.size(); ++j) {
    e = v[j] - u[j] * c;
    t += e * e;
  }
  return t;
}

// acosh(1 + t) / sqrt(t (t + 2)), the t -> 0 limit being 1.
template <Real R>
R acosh_ratio(const R& t) {
  using std::sqrt;
  if (t < 1e-8) return 1.0 - t / 3.0;
  return acosh1p(t) / sqrt(t * (t + 2.0));
}

template <Real R>
std::vector<R> normalized(std::vector<R> v) {
  using std::sqrt;
  const R len = sqrt(norm2<R>(v));
  for (auto& x : v) x /= len;
  return v;
}

template <Real R>
struct Run {
  std::vector<R> u;
  R loss;
  R grad_norm;
  bool converged = false;
};

template <Real R>
Run<R> descend(std::vector<R> u, const PgaProblem<R>& prob, const PgaOptions& opts) {
  using std::sqrt;
  Run<R> run;
  R f = pga_loss<R>(u, prob);
  double eta = 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto g = pga_grad<R>(u, prob);
    const R gg = norm2<R>(g);
    run.grad_norm = sqrt(gg);
    if (!(run.grad_norm > opts.grad_tol)) {
      run.converged = true;
      break;
    }
    bool moved = false;
    eta = std::min(1.0, eta * 4.0);
    for (; eta > 1e-20; eta *= 0.5) {
      std::vector<R> trial(u.size());
      for (std::size_t j = 0; j < u.size(); ++j) trial[j] = u[j] - g[j] * eta;
      trial = normalized(std::move(trial));
      const R ft = pga_loss<R>(trial, prob);
      // Changes within the rounding floor of the loss say nothing; there a step
      // must shrink the gradient instead.
      const R noise = f * (64 * RealTraits<R>::epsilon());
      bool accept = ft <= f - gg * (1e-4 * eta) && ft < f - noise;
      if (!accept && ft <= f + noise) accept = norm2<R>(pga_grad<R>(trial, prob)) < gg;
      if (accept) {
        u = std::move(trial);
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  run.u = std::move(u);
  run.loss = f;
  return run;
}

}  // namespace

template <Real R>
PgaProblem<R> pga_problem_centered(const Matrix<R>& x) {
  using std::sqrt;
  PgaProblem<R> p;
  p.mean.assign(x.cols(), R(0.0));
  p.x = x;
  p.w = Matrix<R>(x.rows(), x.cols());
  const R s8 = sqrt(R(8.0));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const R k = s8 / boundary_gap<R>(x.row(i));
    for (std::size_t j = 0; j < x.cols(); ++j) p.w(i, j) = x(i, j) * k;
  }
  return p;
}

template <Real R>
PgaProblem<R> pga_prepare(const Matrix<R>& pts) {
  if (pts.rows() < 2) throw InputError("PGA needs at least 2 points");
  const auto mean = karcher_mean<R>(pts);
  auto p = pga_problem_centered<R>(translate_to_origin<R>(mean.point, pts));
  p.mean = mean.point;
  return p;
}

template <Real R>
R pga_loss(std::span<const R> u, const PgaProblem<R>& prob) {
  R f(0.0), a;
  for (std::size_t i = 0; i < prob.w.rows(); ++i) {
    a = acosh1p(residual_sq<R>(u, prob.w.row(i)));
    f += a * a;
  }
  return f / 4.0;
}

template <Real R>
R pga_loss_unsimplified(std::span<const R> u, const PgaProblem<R>& prob) {
  R f(0.0), a;
  for (std::size_t i = 0; i < prob.x.rows(); ++i) {
    const R gap = boundary_gap<R>(prob.x.row(i));
    a = acosh1p(residual_sq<R>(u, prob.x.row(i)) * 8.0 / (gap * gap));
    f += a * a;
  }
  return f / 4.0;
}

template <Real R>
std::vector<R> pga_grad(std::span<const R> u, const PgaProblem<R>& prob) {
  // d/du (1/4) h(|w|^2 - (u.w)^2) = -(1/2) h'(t) (u.w) w, h'(t) = 2 acosh(1+t)/sqrt(t(t+2)).
  const std::size_t r = u.size();
  std::vector<R> g(r, R(0.0));
  for (std::size_t i = 0; i < prob.w.rows(); ++i) {
    const auto w = prob.w.row(i);
    const R c = dot<R>(u, w);
    const R k = acosh_ratio(residual_sq<R>(u, w)) * c;
    for (std::size_t j = 0; j < r; ++j) g[j] -= w[j] * k;
  }
  const R along = dot<R>(g, u);
  for (std::size_t j = 0; j < r; ++j) g[j] -= u[j] * along;
  return g;
}

std::vector<std::vector<double>> pga_start_directions(int r, int restarts, std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  if (restarts <= 0) return out;
  const double pi = std::numbers::pi;
  if (r == 1) {
    out.push_back({1.0});
  } else if (r == 2) {
    for (int k = 0; k < restarts; ++k) {
      const double a = pi * (k + 0.5) / restarts;
      out.push_back({std::cos(a), std::sin(a)});
    }
  } else if (r == 3) {
    // Fibonacci points on the upper hemisphere.
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < restarts; ++k) {
      const double z = 1.0 - (k + 0.5) / restarts;
      const double rad = std::sqrt(1.0 - z * z);
      out.push_back({rad * std::cos(golden * k), rad * std::sin(golden * k), z});
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int k = 0; k < restarts; ++k) {
      std::vector<double> v(static_cast<std::size_t>(r));
      double s = 0;
      for (auto& x : v) {
        x = g(rng);
        s += x * x;
      }
      for (auto& x : v) x /= std::sqrt(s);
      out.push_back(v);
    }
  }
  return out;
}

template <Real R>
void canonicalize_sign(std::vector<R>& u) {
  using std::abs;
  for (const R& v : u) {
    if (abs(v) > 1e-12) {
      if (v < 0.0)
        for (auto& x : u) x = -x;
      return;
    }
  }
}

template <Real R>
PgaFit<R> fit_geodesic(const PgaProblem<R>& prob, PgaOptions opts) {
  const std::size_t r = prob.w.cols();
  if (r == 0 || prob.w.rows() == 0) throw InputError("PGA problem is empty");
  std::vector<std::vector<R>> starts;
  {
    // Top eigenvector of sum_i w_i w_i^T.
    SymMatrix<R> c(r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a; b < r; ++b) {
        R s(0.0);
        for (std::size_t i = 0; i < prob.w.rows(); ++i) s += prob.w(i, a) * prob.w(i, b);
        c.set(a, b, s);
      }
    const auto eig = sym_eig(c, 1);
    std::vector<R> v(r);
    for (std::size_t j = 0; j < r; ++j) v[j] = eig.vectors(j, 0);
    starts.push_back(normalized(std::move(v)));
  }
  for (const auto& d : pga_start_directions(static_cast<int>(r), opts.restarts, opts.seed)) {
    std::vector<R> v(r);
    for (std::size_t j = 0; j < r; ++j) v[j] = R(d[j]);
    starts.push_back(std::move(v));
  }

  std::vector<Run<R>> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t k) { runs[k] = descend<R>(starts[k], prob, opts); });

  PgaFit<R> fit;
  fit.restarts = static_cast<int>(starts.size()) - 1;
  std::size_t best = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    fit.restart_losses.push_back(runs[k].loss);
    fit.restart_converged.push_back(runs[k].converged);
    if (runs[k].loss < runs[best].loss) best = k;
  }
  fit.best_restart = static_cast<int>(best);
  fit.direction = runs[best].u;
  canonicalize_sign(fit.direction);
  fit.loss = runs[best].loss;
  fit.gradient_norm = runs[best].grad_norm;
  fit.converged = runs[best].converged;
  fit.convexity_certified = convexity_certificate<R>(fit.direction, prob).certified;
  return fit;
}

template <Real R>
ConvexityCertificate convexity_certificate(std::span<const R> u, const PgaProblem<R>& prob) {
  ConvexityCertificate c;
  c.certified = true;
  for (std::size_t i = 0; i < prob.w.rows(); ++i) {
    const R a = acosh1p(residual_sq<R>(u, prob.w.row(i)));
    const R ww = norm2<R>(prob.w.row(i)) / 3.0;
    const R rhs = ww < 1.0 ? ww : R(1.0);
    const bool ok = a * a < rhs;
    c.per_point.push_back(ok);
    c.certified = c.certified && ok;
  }
  return c;
}

template <Real R>
std::vector<GeodesicProjection<R>> project_to_geodesic(const PgaProblem<R>& prob, std::span<const R> u) {
  using std::atanh;
  using std::tanh;
  std::vector<GeodesicProjection<R>> out;
  const std::size_t r = u.size();
  for (std::size_t i = 0; i < prob.x.rows(); ++i) {
    const auto x = prob.x.row(i);
    const R c = dot<R>(u, x);
    // Foot of the perpendicular: tanh(s) = 2 (u.x) / (1 + |x|^2).
    const R s = atanh(c * 2.0 / (norm2<R>(x) + 1.0));
    GeodesicProjection<R> p;
    p.coordinate = s;
    p.foot.resize(r);
    const R rad = tanh(s / 2.0);
    for (std::size_t j = 0; j < r; ++j) p.foot[j] = u[j] * rad;
    std::vector<R> reflected(r);
    for (std::size_t j = 0; j < r; ++j) reflected[j] = u[j] * (c * 2.0) - x[j];
    p.residual = dist_poincare<R>(std::span<const R>(reflected), x) / 2.0;
    out.push_back(std::move(p));
  }
  return out;
}

#define HYPEMBED_INSTANTIATE(R)                                                                     \
  template PgaProblem<R> pga_prepare<R>(const Matrix<R>&);                                          \
  template PgaProblem<R> pga_problem_centered<R>(const Matrix<R>&);                                 \
  template R pga_loss<R>(std::span<const R>, const PgaProblem<R>&);                                 \
  template R pga_loss_unsimplified<R>(std::span<const R>, const PgaProblem<R>&);                    \
  template std::vector<R> pga_grad<R>(std::span<const R>, const PgaProblem<R>&);                    \
  template PgaFit<R> fit_geodesic<R>(const PgaProblem<R>&, PgaOptions);                             \
  template ConvexityCertificate convexity_certificate<R>(std::span<const R>, const PgaProblem<R>&); \
  template std::vector<GeodesicProjection<R>> project_to_geodesic<R>(const PgaProblem<R>&, std::span<const R>); \
  template void canonicalize_sign<R>(std::vector<R>&);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
