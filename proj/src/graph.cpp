#include "hypembed/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "hypembed/errors.hpp"

namespace hypembed {

std::size_t Graph::add_node(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  const std::size_t id = labels_.size();
  labels_.push_back(label);
  index_.emplace(label, id);
  adj_.emplace_back();
  return id;
}

void Graph::add_edge(std::size_t u, std::size_t v, double weight) {
  if (u >= size() || v >= size()) throw InputError("edge endpoint out of range");
  if (u == v) throw InputError("self-loop on node '" + labels_[u] + "'");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InputError("edge weight must be positive and finite: '" + labels_[u] + "'-'" + labels_[v] + "'");
  }
  if (has_edge(u, v)) throw InputError("duplicate edge '" + labels_[u] + "'-'" + labels_[v] + "'");
  const std::size_t e = edges_.size();
  edges_.push_back({u, v, weight});
  adj_[u].emplace_back(v, e);
  adj_[v].emplace_back(u, e);
}

std::size_t Graph::max_degree() const {
  std::size_t m = 0;
  for (const auto& a : adj_) m = std::max(m, a.size());
  return m;
}

std::size_t Graph::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  return it == index_.end() ? kNoNode : it->second;
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
  const std::size_t other = adj_[u].size() <= adj_[v].size() ? v : u;
  return std::any_of(a.begin(), a.end(), [&](const auto& p) { return p.first == other; });
}

bool Graph::unit_weights() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.weight == 1.0; });
}

bool Graph::connected() const {
  if (size() == 0) return true;
  std::vector<char> seen(size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (const auto& [y, e] : adj_[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count == size();
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

Graph load_edge_list(std::string_view text) {
  Graph g;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() < 2 || fields.size() > 3) throw InputError(where + "expected 'u<TAB>v[<TAB>w]'");
    const std::string u(trim(fields[0])), v(trim(fields[1]));
    if (u.empty() || v.empty()) throw InputError(where + "empty node label");
    if (u == v) throw InputError(where + "self-loop on '" + u + "'");
    double w = 1.0;
    if (fields.size() == 3) {
      try {
        w = parse_real<double>(trim(fields[2]));
      } catch (const InputError&) {
        throw InputError(where + "bad weight '" + std::string(fields[2]) + "'");
      }
      if (!(w > 0.0) || !std::isfinite(w)) throw InputError(where + "weight must be positive");
    }
    const std::size_t a = g.add_node(u), b = g.add_node(v);
    try {
      g.add_edge(a, b, w);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return g;
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  for (const Edge& e : g.edges()) {
    out << g.label(e.u) << '\t' << g.label(e.v);
    if (e.weight != 1.0) out << '\t' << format_real(e.weight);
    out << '\n';
  }
  return out.str();
}

WeightedTree bfs_tree(const Graph& g, std::size_t root) {
  if (root >= g.size()) throw InputError("root index out of range");
  WeightedTree t;
  for (const auto& l : g.labels()) t.graph.add_node(l);
  const std::size_t n = g.size();
  t.root = root;
  t.parent.assign(n, kNoNode);
  t.parent_weight.assign(n, 0.0);
  t.children.assign(n, {});
  t.depth.assign(n, 0);
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{root};
  seen[root] = 1;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    t.order.push_back(x);
    for (const auto& [y, e] : g.neighbors(x)) {
      if (seen[y]) continue;
      seen[y] = 1;
      t.parent[y] = x;
      t.parent_weight[y] = g.edges()[e].weight;
      t.children[x].push_back(y);
      t.depth[y] = t.depth[x] + 1;
      t.graph.add_edge(x, y, g.edges()[e].weight);
      queue.push_back(y);
    }
  }
  if (t.order.size() != n) {
    const auto missing = static_cast<std::size_t>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
    throw InputError("graph is disconnected: '" + g.label(root) + "' and '" + g.label(missing) +
                     "' are not connected");
  }
  return t;
}

WeightedTree closure_weights(const WeightedTree& t, double base) {
  if (!(base > 1.0)) throw InputError("closure base must exceed 1");
  WeightedTree out = t;
  out.graph = Graph();
  for (const auto& l : t.graph.labels()) out.graph.add_node(l);
  for (std::size_t x : t.order) {
    for (std::size_t c : t.children[x]) {
      const double w = std::pow(base, static_cast<double>(t.depth[x]));
      out.parent_weight[c] = w;
      out.graph.add_edge(x, c, w);
    }
  }
  return out;
}

double weighted_longest_path(const WeightedTree& t) {
  // Two deepest weighted descents through every node, bottom-up.
  const std::size_t n = t.parent.size();
  std::vector<double> down(n, 0.0);
  double best = 0.0;
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    const std::size_t x = *it;
    double first = 0.0, second = 0.0;
    for (std::size_t c : t.children[x]) {
      const double len = down[c] + t.parent_weight[c];
      if (len > first) {
        second = first;
        first = len;
      } else if (len > second) {
        second = len;
      }
    }
    down[x] = first;
    best = std::max(best, first + second);
  }
  return best;
}

template <Real R>
bool DistanceMatrix<R>::fully_observed() const {
  return mask.empty() || std::all_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; });
}

template <Real R>
std::size_t DistanceMatrix<R>::observed_pairs() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) c += observed(i, j) ? 1 : 0;
  return c;
}

template <Real R>
DistanceMatrix<R> shortest_path_matrix(const Graph& g) {
  const std::size_t n = g.size();
  DistanceMatrix<R> out{g.labels(), Matrix<R>(n, n), {}};
  const bool unit = g.unit_weights();
  std::vector<std::size_t> pred(n), pred_edge(n), order;
  std::vector<double> dist(n);
  std::vector<R> exact(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(pred.begin(), pred.end(), kNoNode);
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    order.clear();
    dist[s] = 0.0;
    if (unit) {
      std::deque<std::size_t> queue{s};
      while (!queue.empty()) {
        const std::size_t x = queue.front();
        queue.pop_front();
        order.push_back(x);
        for (const auto& [y, e] : g.neighbors(x)) {
          if (dist[y] != std::numeric_limits<double>::infinity()) continue;
          dist[y] = dist[x] + 1.0;
          pred[y] = x;
          pred_edge[y] = e;
          queue.push_back(y);
        }
      }
    } else {
      using Item = std::pair<double, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      heap.emplace(0.0, s);
      std::vector<char> done(n, 0);
      while (!heap.empty()) {
        const auto [dx, x] = heap.top();
        heap.pop();
        if (done[x]) continue;
        done[x] = 1;
        order.push_back(x);
        for (const auto& [y, e] : g.neighbors(x)) {
          const double cand = dx + g.edges()[e].weight;
          if (cand < dist[y]) {
            dist[y] = cand;
            pred[y] = x;
            pred_edge[y] = e;
            heap.emplace(cand, y);
          }
        }
      }
    }
    if (order.size() != n) {
      std::size_t missing = 0;
      while (dist[missing] != std::numeric_limits<double>::infinity()) ++missing;
      throw InputError("graph is disconnected: '" + g.label(s) + "' and '" + g.label(missing) +
                       "' are not connected");
    }
    // Re-sum along the shortest-path tree in R so weights are added exactly.
    exact[s] = R(0.0);
    for (std::size_t k = 1; k < order.size(); ++k) {
      const std::size_t y = order[k];
      exact[y] = exact[pred[y]] + R(g.edges()[pred_edge[y]].weight);
    }
    for (std::size_t j = 0; j < n; ++j) out.d(s, j) = exact[j];
  }
  // Enforce exact symmetry.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.d(j, i) = out.d(i, j);
  return out;
}

template <Real R>
DistanceMatrix<R> sample_matrix(const DistanceMatrix<R>& d, const Graph& g, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0)) throw InputError("sampling ratio must be positive");
  const std::size_t n = d.size();
  if (g.size() != n) throw InputError("graph and distance matrix sizes differ");
  DistanceMatrix<R> out = d;
  out.mask.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) out.mask[i * n + i] = 1;
  for (const Edge& e : g.edges()) out.mask[e.u * n + e.v] = out.mask[e.v * n + e.u] = 1;
  std::vector<std::pair<std::size_t, std::size_t>> non_edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!g.has_edge(i, j)) non_edges.emplace_back(i, j);
  const double want = std::floor(ratio * static_cast<double>(g.edges().size()));
  const std::size_t take = want >= static_cast<double>(non_edges.size()) ? non_edges.size()
                                                                         : static_cast<std::size_t>(want);
  // Partial Fisher-Yates with an explicit engine so the draw is portable.
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t span = non_edges.size() - k;
    const std::size_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t draw;
    do draw = rng(); while (draw >= limit);
    std::swap(non_edges[k], non_edges[k + draw % span]);
    const auto [i, j] = non_edges[k];
    out.mask[i * n + j] = out.mask[j * n + i] = 1;
  }
  return out;
}

template <Real R>
DistanceMatrix<R> complete_matrix(const DistanceMatrix<R>& d) {
  const std::size_t n = d.size();
  DistanceMatrix<R> out{d.labels, d.d, {}};
  if (d.fully_observed()) return out;
  std::vector<R> dist(n);
  std::vector<char> reached(n), done(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(reached.begin(), reached.end(), 0);
    std::fill(done.begin(), done.end(), 0);
    dist[s] = R(0.0);
    reached[s] = 1;
    // Dense Dijkstra over the observed entries.
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t x = kNoNode;
      for (std::size_t k = 0; k < n; ++k)
        if (reached[k] && !done[k] && (x == kNoNode || dist[k] < dist[x])) x = k;
      if (x == kNoNode) break;
      done[x] = 1;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x || done[y] || !d.observed(x, y)) continue;
        R cand = dist[x] + d.d(x, y);
        if (!reached[y] || cand < dist[y]) {
          dist[y] = std::move(cand);
          reached[y] = 1;
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (d.observed(s, j)) continue;
      if (!reached[j]) {
        throw InputError("observed entries do not connect '" + d.labels[s] + "' and '" + d.labels[j] + "'");
      }
      out.d(s, j) = dist[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!d.observed(i, j)) out.d(j, i) = out.d(i, j);
  return out;
}

namespace {

Graph numbered(std::size_t n) {
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(std::to_string(i));
  return g;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace

Graph balanced_tree(int branching, int depth) {
  require(branching >= 1 && depth >= 0, "balanced_tree needs branching >= 1 and depth >= 0");
  std::size_t n = 1, level = 1;
  for (int d = 0; d < depth; ++d) {
    level *= static_cast<std::size_t>(branching);
    n += level;
    require(n <= 10'000'000, "balanced_tree too large");
  }
  Graph g = numbered(n);
  for (std::size_t c = 1; c < n; ++c) g.add_edge((c - 1) / static_cast<std::size_t>(branching), c);
  return g;
}

Graph chain_star(int deg_max, int chain_length) {
  require(deg_max >= 1 && chain_length >= 1, "chain_star needs deg_max >= 1 and chain length >= 1");
  const auto d = static_cast<std::size_t>(deg_max), m = static_cast<std::size_t>(chain_length);
  Graph g = numbered(1 + d * m);
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t prev = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t id = 1 + c * m + k;
      g.add_edge(prev, id);
      prev = id;
    }
  }
  return g;
}

Graph path_graph(int n) {
  require(n >= 1, "path needs n >= 1");
  Graph g = numbered(static_cast<std::size_t>(n));
  for (std::size_t i = 1; i < g.size(); ++i) g.add_edge(i - 1, i);
  return g;
}

Graph star_graph(int leaves) {
  require(leaves >= 1, "star needs at least one leaf");
  Graph g = numbered(static_cast<std::size_t>(leaves) + 1);
  for (std::size_t i = 1; i < g.size(); ++i) g.add_edge(0, i);
  return g;
}

Graph clique(int n) {
  require(n >= 1, "clique needs n >= 1");
  Graph g = numbered(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) g.add_edge(i, j);
  return g;
}

Graph steiner_star(int leaves) {
  require(leaves >= 1, "steiner_star needs at least one leaf");
  Graph g = numbered(static_cast<std::size_t>(leaves) + 1);
  const std::size_t center = static_cast<std::size_t>(leaves);
  for (std::size_t i = 0; i < center; ++i) g.add_edge(center, i, 0.5);
  return g;
}

Graph cycle_graph(int n) {
  require(n >= 3, "cycle needs n >= 3");
  Graph g = numbered(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < g.size(); ++i) g.add_edge(i, (i + 1) % g.size());
  return g;
}

Graph gen_fixture(std::string_view kind, const std::vector<int>& p) {
  auto need = [&](std::size_t k) {
    if (p.size() != k) {
      throw InputError(std::string(kind) + " takes " + std::to_string(k) + " parameter(s), got " +
                       std::to_string(p.size()));
    }
  };
  if (kind == "balanced_tree") return need(2), balanced_tree(p[0], p[1]);
  if (kind == "chain_star") return need(2), chain_star(p[0], p[1]);
  if (kind == "path") return need(1), path_graph(p[0]);
  if (kind == "star") return need(1), star_graph(p[0]);
  if (kind == "clique") return need(1), clique(p[0]);
  if (kind == "steiner_star") return need(1), steiner_star(p[0]);
  if (kind == "cycle") return need(1), cycle_graph(p[0]);
  throw InputError("unknown fixture kind '" + std::string(kind) + "'");
}

#define HYPEMBED_INSTANTIATE(R)                                                                         \
  template struct DistanceMatrix<R>;                                                                   \
  template DistanceMatrix<R> shortest_path_matrix<R>(const Graph&);                                    \
  template DistanceMatrix<R> sample_matrix<R>(const DistanceMatrix<R>&, const Graph&, double, std::uint64_t); \
  template DistanceMatrix<R> complete_matrix<R>(const DistanceMatrix<R>&);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
