#include "hypembed/optim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hypembed/metrics.hpp"
#include "hypembed/parallel.hpp"

namespace hypembed {

namespace {

template <Real R>
R pair_weight(const R& d, double beta) {
  using std::exp;
  if (beta == 0.0) return R(1.0);
  return exp(d * -beta);
}

template <Real R>
void pull_inside(std::span<R> x, double max_norm) {
  using std::sqrt;
  const R len = sqrt(norm2<R>(std::span<const R>(x.data(), x.size())));
  if (len > max_norm) {
    const R k = max_norm / len;
    for (auto& v : x) v *= k;
  }
}

}  // namespace

template <Real R>
PairList observed_pair_list(const DistanceMatrix<R>& d) {
  PairList out;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (d.observed(i, j)) out.emplace_back(i, j);
  return out;
}

template <Real R>
R sgd_loss(const Matrix<R>& x, const R& tau, const DistanceMatrix<R>& d, double beta) {
  R loss(0.0), e;
  for (const auto& [i, j] : observed_pair_list(d)) {
    e = tau * dist_poincare<R>(x.row(i), x.row(j)) - d.d(i, j);
    loss += pair_weight(d.d(i, j), beta) * e * e;
  }
  return loss;
}

template <Real R>
SgdGradient<R> sgd_gradient(const Matrix<R>& x, const R& tau, const DistanceMatrix<R>& d, const PairList& pairs,
                            double beta) {
  using std::isfinite;
  using std::sqrt;
  const std::size_t n = x.rows(), r = x.cols();
  // Per-node incident pairs, kept in batch order for a deterministic sum.
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    incident[pairs[p].first].push_back(p);
    incident[pairs[p].second].push_back(p);
  }
  SgdGradient<R> g{Matrix<R>(n, r), R(0.0)};
  std::vector<R> tau_part(n, R(0.0));
  parallel_for(n, [&](std::size_t i) {
    const auto xi = x.row(i);
    const R ai = boundary_gap<R>(xi);
    R diff2, q, dh, coef, k;
    for (std::size_t p : incident[i]) {
      const std::size_t j = pairs[p].first == i ? pairs[p].second : pairs[p].first;
      const auto xj = x.row(j);
      const R aj = boundary_gap<R>(xj);
      diff2 = R(0.0);
      for (std::size_t c = 0; c < r; ++c) diff2 += (xi[c] - xj[c]) * (xi[c] - xj[c]);
      q = diff2 * 2.0 / (ai * aj);
      dh = acosh1p(q);
      const R w = pair_weight(d.d(i, j), beta);
      // dL/dD for this pair.
      coef = w * (tau * dh - d.d(i, j)) * 2.0;
      if (i == pairs[p].first) tau_part[i] += coef * dh;
      if (!(q > 0.0)) continue;
      // dD/dq * dq/dx_i = (4 / (ai aj sqrt(q (q + 2)))) ((x_i - x_j) + |x_i - x_j|^2 x_i / ai).
      k = coef * tau * 4.0 / (ai * aj * sqrt(q * (q + 2.0)));
      for (std::size_t c = 0; c < r; ++c) {
        const R term = k * ((xi[c] - xj[c]) + diff2 * xi[c] / ai);
        if (!isfinite(term)) {
          throw NumericalError("non-finite gradient for pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        g.x(i, c) += term;
      }
    }
  });
  for (const R& t : tau_part) g.tau += t;
  return g;
}

template <Real R>
void sgd_step(SgdState<R>& s, const DistanceMatrix<R>& d, const PairList& batch, const SgdConfig& cfg) {
  if (batch.empty()) return;
  const auto g = sgd_gradient(s.x, s.tau, d, batch, cfg.beta);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < s.x.rows(); ++i) {
    auto xi = s.x.row(i);
    const R a = boundary_gap<R>(std::span<const R>(xi.data(), xi.size()));
    const R metric = a * a * (0.25 * inv);
    for (std::size_t c = 0; c < s.x.cols(); ++c) {
      R step = g.x(i, c) * metric;
      if (step > cfg.clip) step = cfg.clip;
      if (step < -cfg.clip) step = -cfg.clip;
      xi[c] -= step * cfg.lr;
    }
    pull_inside<R>(xi, cfg.max_norm);
  }
  s.tau -= g.tau * (cfg.lr * inv);
  if (s.tau < cfg.tau_min) s.tau = R(cfg.tau_min);
}

template <Real R>
SgdResult<R> sgd_embed(const DistanceMatrix<R>& d, const SgdConfig& cfg, const Embedding<R>* warm) {
  using std::sqrt;
  const std::size_t n = d.size();
  if (cfg.rank < 1) throw InputError("rank must be at least 1");
  if (!(cfg.lr > 0)) throw InputError("learning rate must be positive");
  const PairList all = observed_pair_list(d);
  if (all.empty()) throw InputError("no observed pairs");

  R rms(0.0);
  for (const auto& [i, j] : all) rms += d.d(i, j) * d.d(i, j);
  rms = sqrt(rms / static_cast<double>(all.size()));
  if (!(rms > 0.0)) throw InputError("all observed distances are zero");
  DistanceMatrix<R> dn = d;
  for (auto& v : dn.d.data()) v /= rms;
  // Weights follow the original distances.
  SgdConfig ncfg = cfg;
  ncfg.beta = cfg.beta * to_double(rms);
  ncfg.tau_min = cfg.tau_min / to_double(rms);

  SgdState<R> s{Matrix<R>(n, static_cast<std::size_t>(cfg.rank)), R(cfg.tau_init) / rms};
  std::mt19937_64 rng(cfg.seed);
  if (warm) {
    const auto aligned = align_embedding(*warm, d.labels);
    if (aligned.dim() != static_cast<std::size_t>(cfg.rank)) throw InputError("warm start dimension differs from rank");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < aligned.dim(); ++c) s.x(i, c) = convert_real<R>(aligned.points(i, c));
    s.tau = R(1.0 / warm->scale) / rms;
  } else {
    std::uniform_real_distribution<double> u(-cfg.init_radius, cfg.init_radius);
    for (auto& v : s.x.data()) v = R(u(rng));
  }
  for (std::size_t i = 0; i < n; ++i) pull_inside<R>(s.x.row(i), cfg.max_norm);
  if (s.tau < ncfg.tau_min) s.tau = R(ncfg.tau_min);

  SgdResult<R> res;
  res.min_tau = to_double(s.tau);
  const R unit = rms * rms;
  auto record = [&] { res.loss_trace.push_back(to_double(sgd_loss(s.x, s.tau, dn, ncfg.beta) * unit)); };
  PairList order = all;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    record();
    if (n <= cfg.full_batch_limit) {
      sgd_step(s, dn, all, ncfg);
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t b = 0; b < order.size(); b += cfg.batch_pairs) {
        const PairList batch(order.begin() + b, order.begin() + std::min(order.size(), b + cfg.batch_pairs));
        sgd_step(s, dn, batch, ncfg);
      }
    }
    res.min_tau = std::min(res.min_tau, to_double(s.tau));
  }
  record();

  res.tau = s.tau * rms;
  res.embedding.labels = d.labels;
  res.embedding.points = std::move(s.x);
  res.embedding.method = "sgd";
  res.embedding.scale = 1.0 / to_double(res.tau);
  res.embedding.precision = RealTraits<R>::bits();
  res.min_tau *= to_double(rms);
  return res;
}

#define HYPEMBED_INSTANTIATE(R)                                                                             \
  template PairList observed_pair_list<R>(const DistanceMatrix<R>&);                                        \
  template R sgd_loss<R>(const Matrix<R>&, const R&, const DistanceMatrix<R>&, double);                     \
  template SgdGradient<R> sgd_gradient<R>(const Matrix<R>&, const R&, const DistanceMatrix<R>&, const PairList&, \
                                          double);                                                          \
  template void sgd_step<R>(SgdState<R>&, const DistanceMatrix<R>&, const PairList&, const SgdConfig&);     \
  template SgdResult<R> sgd_embed<R>(const DistanceMatrix<R>&, const SgdConfig&, const Embedding<R>*);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
