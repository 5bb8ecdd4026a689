#include "hypembed/metrics.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "hypembed/parallel.hpp"

namespace hypembed {

template <Real R>
Embedding<R> align_embedding(const Embedding<R>& e, const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < e.labels.size(); ++i) pos.emplace(e.labels[i], i);
  Embedding<R> out = e;
  out.labels = labels;
  out.points = Matrix<R>(labels.size(), e.dim());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = pos.find(labels[i]);
    if (it == pos.end()) throw InputError("embedding has no point for node '" + labels[i] + "'");
    auto src = e.points.row(it->second);
    std::copy(src.begin(), src.end(), out.points.row(i).begin());
  }
  return out;
}

template <Real R>
Matrix<double> embedded_distances(const Embedding<R>& e) {
  const std::size_t n = e.size();
  Matrix<double> d(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = distance_double<R>(e.points.row(i), e.points.row(j));
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) d(i, j) = d(j, i);
  return d;
}

namespace {

std::vector<std::size_t> hop_counts(const Graph& g, std::size_t src) {
  std::vector<std::size_t> hops(g.size(), kNoNode);
  std::deque<std::size_t> queue{src};
  hops[src] = 0;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (const auto& [y, e] : g.neighbors(x)) {
      if (hops[y] == kNoNode) {
        hops[y] = hops[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return hops;
}

template <Real R>
void check_truth(const DistanceMatrix<R>& truth, const Matrix<double>& dist) {
  if (dist.rows() != truth.size()) throw InputError("distance matrix and embedding sizes differ");
  if (!truth.fully_observed()) throw InputError("distortion needs a fully observed distance matrix");
}

double positive_entry(double d, std::size_t i, std::size_t j) {
  if (!(d > 0.0)) {
    throw InputError("distance between nodes " + std::to_string(i) + " and " + std::to_string(j) + " is not positive");
  }
  return d;
}

}  // namespace

double map_score(const Graph& g, const Matrix<double>& dist, int k_hops) {
  const std::size_t n = g.size();
  if (dist.rows() != n) throw InputError("graph and embedding sizes differ");
  if (k_hops < 1) throw InputError("k_hops must be at least 1");
  std::vector<double> ap(n, 0.0);
  std::vector<char> has(n, 0);
  parallel_for(n, [&](std::size_t a) {
    const auto hops = hop_counts(g, a);
    auto is_nbr = [&](std::size_t c) { return c != a && hops[c] != kNoNode && hops[c] <= static_cast<std::size_t>(k_hops); };
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t c = 0; c < n; ++c)
      if (c != a) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dist(a, x) < dist(a, y); });
    // Ball size and neighbour count for every radius, ties grouped.
    std::vector<std::size_t> ball(n, 0), hits(n, 0);
    std::size_t seen = 0, seen_hits = 0;
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j < order.size() && dist(a, order[j]) == dist(a, order[i])) {
        seen_hits += is_nbr(order[j]) ? 1 : 0;
        ++j;
      }
      seen = j;
      for (std::size_t k = i; k < j; ++k) {
        ball[order[k]] = seen;
        hits[order[k]] = seen_hits;
      }
      i = j;
    }
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < n; ++b) {
      if (!is_nbr(b)) continue;
      sum += static_cast<double>(hits[b]) / static_cast<double>(ball[b]);
      ++count;
    }
    if (count > 0) {
      ap[a] = sum / static_cast<double>(count);
      has[a] = 1;
    }
  });
  double total = 0;
  std::size_t used = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!has[a]) continue;
    total += ap[a];
    ++used;
  }
  return used == 0 ? 1.0 : total / static_cast<double>(used);
}

template <Real R>
double distortion_avg(const DistanceMatrix<R>& truth, const Matrix<double>& dist, double scale) {
  check_truth(truth, dist);
  const std::size_t n = truth.size();
  double s = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++pairs) {
      const double t = positive_entry(to_double(truth.d(i, j)), i, j);
      s += std::abs(dist(i, j) / scale - t) / t;
    }
  return pairs == 0 ? 0.0 : s / static_cast<double>(pairs);
}

template <Real R>
double distortion_wc(const DistanceMatrix<R>& truth, const Matrix<double>& dist) {
  check_truth(truth, dist);
  const std::size_t n = truth.size();
  double expand = 0, contract = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double t = positive_entry(to_double(truth.d(i, j)), i, j);
      expand = std::max(expand, dist(i, j) / t);
      contract = std::max(contract, t / dist(i, j));
    }
  return n < 2 ? 1.0 : expand * contract;
}

template <Real R>
FidelityReport evaluate(const Graph& g, const DistanceMatrix<R>& truth, const Embedding<R>& e, int k_hops) {
  const auto aligned = align_embedding(e, g.labels());
  const auto dist = embedded_distances(aligned);
  FidelityReport rep;
  rep.n = g.size();
  rep.pairs = rep.n * (rep.n - (rep.n > 0 ? 1 : 0)) / 2;
  rep.k_hops = k_hops;
  rep.map = map_score(g, dist, 1);
  rep.k_map = map_score(g, dist, k_hops);
  rep.distortion_avg = distortion_avg(truth, dist, e.scale);
  rep.distortion_wc = distortion_wc(truth, dist);
  return rep;
}

#define HYPEMBED_INSTANTIATE(R)                                                                       \
  template Embedding<R> align_embedding<R>(const Embedding<R>&, const std::vector<std::string>&);     \
  template Matrix<double> embedded_distances<R>(const Embedding<R>&);                                 \
  template double distortion_avg<R>(const DistanceMatrix<R>&, const Matrix<double>&, double);         \
  template double distortion_wc<R>(const DistanceMatrix<R>&, const Matrix<double>&);                  \
  template FidelityReport evaluate<R>(const Graph&, const DistanceMatrix<R>&, const Embedding<R>&, int);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
