#pragma once

// Independent reference implementations used only by the tests. They favour
// obviousness over speed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// All-pairs shortest paths from an explicit edge list.
inline Dense floyd_warshall(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  Dense d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [u, v, w] : edges) d[u][v] = d[v][u] = std::min(d[u][v], w);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// MAP by literally sorting every distance list. Neighbors are the nodes with
// graph distance in [1, hops]; R_{a,b} is every other node at embedded
// distance <= d(a,b).
inline double map_bruteforce(const Dense& graph_dist, const Dense& emb, int hops = 1) {
  const std::size_t n = emb.size();
  double total = 0;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> nbrs;
    for (std::size_t b = 0; b < n; ++b)
      if (b != a && graph_dist[a][b] <= hops) nbrs.push_back(b);
    double ap = 0;
    for (std::size_t b : nbrs) {
      std::size_t in_ball = 0, hits = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a || emb[a][c] > emb[a][b]) continue;
        ++in_ball;
        if (graph_dist[a][c] <= hops) ++hits;
      }
      ap += static_cast<double>(hits) / static_cast<double>(in_ball);
    }
    total += ap / static_cast<double>(nbrs.size());
  }
  return total / static_cast<double>(n);
}

inline double distortion_avg_bruteforce(const Dense& truth, const Dense& emb) {
  const std::size_t n = truth.size();
  double s = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++pairs) s += std::abs(emb[i][j] - truth[i][j]) / truth[i][j];
  return s / static_cast<double>(pairs);
}

inline double distortion_wc_bruteforce(const Dense& truth, const Dense& emb) {
  double expand = 0, contract = 0;
  const std::size_t n = truth.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      expand = std::max(expand, emb[i][j] / truth[i][j]);
      contract = std::max(contract, truth[i][j] / emb[i][j]);
    }
  return expand * contract;
}

// Central finite difference of f along coordinate k.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 std::size_t k, double h) {
  const double x0 = x[k];
  x[k] = x0 + h;
  const double fp = f(x);
  x[k] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

}  // namespace oracle
