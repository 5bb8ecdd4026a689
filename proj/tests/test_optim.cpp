#include <random>

#include "doctest.h"
#include "hypembed/combinatorial.hpp"
#include "hypembed/metrics.hpp"
#include "hypembed/optim.hpp"
#include "oracles.hpp"

using namespace hypembed;

namespace {

Graph random_tree(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    g.add_edge(pick(rng), i);
  }
  return g;
}

Matrix<double> random_points(std::size_t n, int r, double scale, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix<double> m(n, r);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

DistanceMatrix<double> distances_of(const Matrix<double>& pts) {
  const std::size_t n = pts.rows();
  DistanceMatrix<double> d;
  for (std::size_t i = 0; i < n; ++i) d.labels.push_back(std::to_string(i));
  d.d = Matrix<double>(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.d(i, j) = d.d(j, i) = dist_poincare<double>(pts.row(i), pts.row(j));
  return d;
}

}  // namespace

TEST_CASE("sgd_loss") {
  const auto pts = random_points(6, 2, 0.5, 1);
  const auto d = distances_of(pts);
  CHECK(sgd_loss<double>(pts, 1.0, d) <= 1e-28);

  Matrix<double> two(2, 2);
  two(1, 0) = std::tanh(0.5);  // d_H(0, x) = 1
  DistanceMatrix<double> target{{"a", "b"}, Matrix<double>(2, 2), {}};
  target.d(0, 1) = target.d(1, 0) = 2.0;
  CHECK(sgd_loss<double>(two, 1.0, target) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sgd_loss<double>(two, 1.0, target, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  // Only observed pairs count.
  DistanceMatrix<double> masked = target;
  masked.mask = {1, 0, 0, 1};
  CHECK(sgd_loss<double>(two, 1.0, masked) == 0.0);
}

TEST_CASE("sgd_gradient matches finite differences") {
  const auto pts = random_points(7, 3, 0.45, 2);
  auto d = distances_of(random_points(7, 3, 0.6, 3));
  for (double beta : {0.0, 0.5}) {
    const double tau = 1.3;
    const auto pairs = observed_pair_list(d);
    const auto g = sgd_gradient<double>(pts, tau, d, pairs, beta);
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> flat(pts.data());
        auto f = [&](const std::vector<double>& v) {
          Matrix<double> m(7, 3);
          m.data() = v;
          return sgd_loss<double>(m, tau, d, beta);
        };
        const double fd = oracle::central_difference(f, flat, i * 3 + c, 1e-6);
        CHECK(std::abs(fd - g.x(i, c)) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    auto ft = [&](const std::vector<double>& v) { return sgd_loss<double>(pts, v[0], d, beta); };
    const double fd_tau = oracle::central_difference(ft, {tau}, 0, 1e-6);
    CHECK(std::abs(fd_tau - g.tau) <= 1e-5 * std::max(1.0, std::abs(fd_tau)));
  }
}

TEST_CASE("sgd_gradient stays bounded at coincident points") {
  DistanceMatrix<double> target{{"a", "b"}, Matrix<double>(2, 2), {}};
  target.d(0, 1) = target.d(1, 0) = 1.0;
  const auto pairs = observed_pair_list(target);
  double prev = -1;
  for (double sep : {1e-2, 1e-4, 1e-6, 1e-8}) {
    Matrix<double> x(2, 2);
    x(0, 0) = 0.3;
    x(1, 0) = 0.3 + sep;
    auto f = [&](const std::vector<double>& v) {
      Matrix<double> m(2, 2);
      m.data() = v;
      return sgd_loss<double>(m, 1.0, target);
    };
    const double fd = oracle::central_difference(f, x.data(), 0, sep / 10);
    CHECK(std::isfinite(fd));
    CHECK(std::abs(fd) < 10);
    if (prev >= 0) CHECK(std::abs(std::abs(fd) - prev) < 0.1);
    prev = std::abs(fd);
  }
  Matrix<double> same(2, 2);
  same(0, 0) = same(1, 0) = 0.2;
  const auto g = sgd_gradient<double>(same, 1.0, target, pairs);
  CHECK(g.x(0, 0) == 0.0);
}

TEST_CASE("sgd_step") {
  const auto pts = random_points(5, 2, 0.5, 4);
  const auto d = distances_of(pts);
  SgdConfig cfg;
  SgdState<double> s{pts, 1.0};
  sgd_step(s, d, observed_pair_list(d), cfg);
  CHECK(s.x.data() == pts.data());
  CHECK(s.tau == 1.0);

  // A point pushed outward stays inside the projection radius.
  Matrix<double> edge(2, 2);
  edge(0, 0) = 0.999995;
  DistanceMatrix<double> far{{"a", "b"}, Matrix<double>(2, 2), {}};
  far.d(0, 1) = far.d(1, 0) = 100.0;
  SgdState<double> e{edge, 1.0};
  cfg.lr = 1e3;
  for (int k = 0; k < 5; ++k) {
    sgd_step(e, far, observed_pair_list(far), cfg);
    CHECK(std::sqrt(norm2<double>(e.x.row(0))) <= cfg.max_norm * (1 + 1e-15));
    CHECK(std::sqrt(norm2<double>(e.x.row(1))) < 1.0);
  }

  // tau is floored.
  DistanceMatrix<double> tiny{{"a", "b"}, Matrix<double>(2, 2), {}};
  tiny.d(0, 1) = tiny.d(1, 0) = 1e-3;
  Matrix<double> apart(2, 2);
  apart(0, 0) = 0.5;
  apart(1, 0) = -0.5;
  SgdState<double> t{apart, 0.2};
  cfg.lr = 10;
  sgd_step(t, tiny, observed_pair_list(tiny), cfg);
  CHECK(t.tau == 0.1);
}

TEST_CASE("sgd_embed converges on a path") {
  const Graph g = path_graph(10);
  const auto d = shortest_path_matrix<double>(g);
  SgdConfig cfg;
  cfg.epochs = 1500;
  auto res = sgd_embed(d, cfg);
  CHECK(res.loss_trace.back() < 0.01 * res.loss_trace.front());
  CHECK(res.min_tau >= 0.1);
  CHECK(res.embedding.scale == doctest::Approx(1.0 / res.tau));
  for (std::size_t i = 0; i < 10; ++i) CHECK(norm2<double>(res.embedding.points.row(i)) < 1.0);
  auto again = sgd_embed(d, cfg);
  CHECK(again.embedding.points.data() == res.embedding.points.data());
}

TEST_CASE("sgd_embed improves a warm start") {
  const Graph g = balanced_tree(3, 3);
  const auto d = shortest_path_matrix<double>(g);
  CombinatorialConfig cc;
  cc.tau = 1.0;
  const auto warm = embed_tree<double>(bfs_tree(g, 0), cc);
  SgdConfig cfg;
  cfg.epochs = 300;
  auto res = sgd_embed(d, cfg, &warm);
  const double before = distortion_avg(d, embedded_distances(warm), warm.scale);
  const double after = distortion_avg(d, embedded_distances(res.embedding), res.embedding.scale);
  CHECK(after <= before);
  CHECK(res.loss_trace.back() <= res.loss_trace.front());
}

TEST_CASE("sgd_embed with sampled distances") {
  const Graph g = random_tree(50, 7);
  const auto full = shortest_path_matrix<double>(g);
  const auto sampled = sample_matrix(full, g, 10.0, 1);
  SgdConfig cfg;
  cfg.seed = 3;
  cfg.epochs = 0;
  auto start = sgd_embed(sampled, cfg);
  cfg.epochs = 1000;
  auto res = sgd_embed(sampled, cfg);
  const double d0 = distortion_avg(full, embedded_distances(start.embedding), start.embedding.scale);
  const double d1 = distortion_avg(full, embedded_distances(res.embedding), res.embedding.scale);
  CHECK(d1 <= 0.6);
  CHECK(d1 <= d0 / 2);

  // The minibatch path reaches a comparable result.
  cfg.full_batch_limit = 10;
  cfg.batch_pairs = 64;
  cfg.epochs = 200;
  auto mb = sgd_embed(sampled, cfg);
  CHECK(distortion_avg(full, embedded_distances(mb.embedding), mb.embedding.scale) <= 0.6);
}

TEST_CASE("sgd_embed absorbs a global scale in tau") {
  const Graph g = balanced_tree(2, 3);
  const auto d = shortest_path_matrix<double>(g);
  auto scaled = d;
  for (auto& v : scaled.d.data()) v *= 10.0;
  SgdConfig cfg;
  cfg.epochs = 300;
  auto a = sgd_embed(d, cfg), b = sgd_embed(scaled, cfg);
  CHECK(to_double(b.tau) == doctest::Approx(10 * to_double(a.tau)).epsilon(0.05));
  CHECK(b.loss_trace.back() / 100 == doctest::Approx(a.loss_trace.back()).epsilon(0.05));
}
