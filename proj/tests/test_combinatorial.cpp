#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hypembed/combinatorial.hpp"
#include "hypembed/metrics.hpp"

using namespace hypembed;

namespace {

template <Real R>
double d_h(const Embedding<R>& e, std::size_t i, std::size_t j) {
  return to_double(dist_poincare<R>(e.points.row(i), e.points.row(j)));
}

double angle_at_origin(std::span<const double> a, std::span<const double> b) {
  return std::acos(std::clamp(dot<double>(a, b) / std::sqrt(norm2<double>(a) * norm2<double>(b)), -1.0, 1.0));
}

}  // namespace

TEST_CASE("compute_tau") {
  CHECK(compute_tau(4, 0.1) == doctest::Approx(22 * std::log(4 / (std::numbers::pi / 2))));
  CHECK(compute_tau(4, 0.1) == doctest::Approx(20.56).epsilon(1e-3));
  CHECK(compute_tau(4, 1.0) == doctest::Approx(3.74).epsilon(1e-3));
  CHECK(compute_tau(4, INFINITY) == doctest::Approx(2 * std::log(4 / (std::numbers::pi / 2))));
  CHECK(compute_tau(4, 1e9) == doctest::Approx(compute_tau(4, INFINITY)));
  CHECK(compute_tau(1, 0.1) == 0.1);
  CHECK(compute_tau(2, 1e6) > 0.1);
  CHECK_THROWS_AS(compute_tau(4, 0.0), InputError);
}

TEST_CASE("place_children_2d") {
  const double tau = 3.0;
  const double radius = (std::exp(tau) - 1) / (std::exp(tau) + 1);
  const std::vector<double> origin{0.0, 0.0};
  auto kids = place_children_2d<double>(origin, std::nullopt, 4, tau);
  REQUIRE(kids.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::sqrt(norm2<double>(kids[i])) == doctest::Approx(radius).epsilon(1e-14));
    CHECK(angle_at_origin(kids[i], kids[(i + 1) % 4]) == doctest::Approx(std::numbers::pi / 2));
  }

  const std::vector<double> gp{-0.3, 0.2};
  const std::vector<double> parent{0.4, -0.1};
  for (std::size_t count : {1u, 2u, 5u}) {
    auto c = place_children_2d<double>(parent, std::span<const double>(gp), count, tau);
    const auto z = translate_to_origin<double>(parent, gp);
    const double deg = static_cast<double>(count + 1);
    for (std::size_t i = 0; i < count; ++i) {
      CHECK(to_double(dist_poincare<double>(parent, c[i])) == doctest::Approx(tau).epsilon(1e-10));
      const auto y = translate_to_origin<double>(parent, c[i]);
      CHECK(angle_at_origin(y, z) >= 2 * std::numbers::pi / deg * (1 - 1e-9) - 1e-9);
      for (std::size_t j = i + 1; j < count; ++j) {
        const auto yj = translate_to_origin<double>(parent, c[j]);
        CHECK(angle_at_origin(y, yj) >= 2 * std::numbers::pi / deg - 1e-9);
      }
    }
  }
}

TEST_CASE("hypercube_code_points") {
  auto c2 = hypercube_code_points<double>(2, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(c2(i, 0)) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(std::abs(c2(i, 1)) == doctest::Approx(1 / std::sqrt(2.0)));
  }
  for (auto [r, count] : std::vector<std::pair<int, std::size_t>>{
           {2, 4}, {2, 3}, {3, 4}, {5, 7}, {10, 8}, {10, 16}, {16, 10}, {16, 32}, {128, 128}, {24, 6}}) {
    auto c = hypercube_code_points<double>(r, count);
    REQUIRE(c.rows() == count);
    double min_dist = 10;
    for (std::size_t i = 0; i < count; ++i) {
      CHECK(norm2<double>(c.row(i)) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t j = i + 1; j < count; ++j) {
        double s = 0;
        for (int k = 0; k < r; ++k) s += (c(i, k) - c(j, k)) * (c(i, k) - c(j, k));
        min_dist = std::min(min_dist, std::sqrt(s));
      }
    }
    CHECK(min_dist >= std::sqrt(2.0) - 1e-12);
  }
  CHECK(hypercube_capacity(2) == 4);
  CHECK(hypercube_capacity(16) == 32);
  CHECK_THROWS_WITH_AS(hypercube_code_points<double>(2, 5), doctest::Contains("larger dimension"), InputError);
}

TEST_CASE("embed_tree 2d edges and geodesics") {
  CombinatorialConfig cfg;
  cfg.tau = 1.5;
  auto single = embed_tree<double>(bfs_tree(path_graph(2), 0), cfg);
  CHECK(d_h(single, 0, 1) == doctest::Approx(1.5).epsilon(1e-12));

  auto path = embed_tree<double>(bfs_tree(path_graph(5), 0), cfg);
  for (std::size_t i = 0; i + 1 < 5; ++i) CHECK(d_h(path, i, i + 1) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(d_h(path, 0, 4) == doctest::Approx(6.0).epsilon(1e-10));

  CombinatorialConfig eps;
  eps.epsilon = 0.1;
  PrecisionScope scope(256);
  for (const Graph& g : {balanced_tree(3, 3), chain_star(4, 3), steiner_star(5), balanced_tree(2, 4)}) {
    const auto t = bfs_tree(g, 0);
    auto e = embed_tree<BigFloat>(t, eps);
    CHECK(to_double(norm2<BigFloat>(e.points.row(0))) == 0.0);
    for (const auto& edge : t.graph.edges())
      CHECK(d_h(e, edge.u, edge.v) == doctest::Approx(e.scale * edge.weight).epsilon(1e-10));
  }
}

TEST_CASE("embed_tree is Delaunay with bounded distortion") {
  PrecisionScope scope(512);
  CombinatorialConfig cfg;
  cfg.epsilon = 0.1;
  for (const Graph& g : {balanced_tree(3, 3), balanced_tree(2, 5), chain_star(5, 4), star_graph(9), path_graph(30)}) {
    const auto t = bfs_tree(g, 0);
    auto e = embed_tree<BigFloat>(t, cfg);
    auto truth = shortest_path_matrix<BigFloat>(g);
    auto rep = evaluate(g, truth, e);
    CHECK(rep.map == 1.0);
    CHECK(rep.distortion_wc <= 1.1);
  }
}

TEST_CASE("embed_tree rd") {
  CombinatorialConfig cfg;
  cfg.tau = 4.0;
  cfg.dim = 16;
  auto e = embed_tree<double>(bfs_tree(star_graph(10), 0), cfg);
  for (std::size_t i = 1; i <= 10; ++i) {
    CHECK(d_h(e, 0, i) == doctest::Approx(4.0).epsilon(1e-12));
    for (std::size_t j = i + 1; j <= 10; ++j) CHECK(angle_at_origin(e.points.row(i), e.points.row(j)) >= std::numbers::pi / 2 - 1e-12);
  }

  CombinatorialConfig code2;
  code2.tau = 3.0;
  code2.force_code = true;
  const auto bt = bfs_tree(balanced_tree(3, 2), 0);
  auto e2 = embed_tree<double>(bt, code2);
  for (const auto& edge : bt.graph.edges()) CHECK(d_h(e2, edge.u, edge.v) == doctest::Approx(3.0).epsilon(1e-10));
  // Children are 90 degrees apart from each other and from the parent direction.
  for (std::size_t a = 1; a <= 3; ++a) {
    const auto z = translate_to_origin<double>(e2.points.row(a), e2.points.row(0));
    for (std::size_t c : bt.children[a]) {
      const auto y = translate_to_origin<double>(e2.points.row(a), e2.points.row(c));
      CHECK(angle_at_origin(y, z) >= std::numbers::pi / 2 - 1e-9);
    }
  }
  CHECK_THROWS_AS(embed_tree<double>(bfs_tree(star_graph(5), 0), code2), InputError);

  PrecisionScope scope(256);
  CombinatorialConfig hi;
  hi.epsilon = 0.1;
  hi.dim = 8;
  const Graph g = balanced_tree(3, 3);
  auto er = embed_tree<BigFloat>(bfs_tree(g, 0), hi);
  CHECK(evaluate(g, shortest_path_matrix<BigFloat>(g), er).map == 1.0);
}

TEST_CASE("higher dimension tolerates a smaller tau") {
  // Smallest tau (on a geometric grid) that keeps MAP at 1.
  const Graph g = balanced_tree(7, 2);
  const auto t = bfs_tree(g, 0);
  auto min_tau = [&](int dim) {
    double best = 0;
    for (double tau = 8.0; tau > 0.05; tau *= 0.9) {
      CombinatorialConfig cfg;
      cfg.tau = tau;
      cfg.dim = dim;
      auto e = embed_tree<double>(t, cfg);
      if (map_score(g, embedded_distances(e)) < 1.0) break;
      best = tau;
    }
    return best;
  };
  const double t2 = min_tau(2), t10 = min_tau(10);
  CHECK(t10 > 0);
  CHECK(t10 < t2);
}

TEST_CASE("required_precision") {
  CombinatorialConfig unit;
  unit.tau = 1.0;
  CHECK(required_precision(bfs_tree(path_graph(2), 0), unit) == 2);

  CombinatorialConfig cfg;
  cfg.epsilon = 0.1;
  const int b3 = required_precision(bfs_tree(chain_star(4, 3), 0), cfg);
  const int b5 = required_precision(bfs_tree(chain_star(4, 5), 0), cfg);
  const int b7 = required_precision(bfs_tree(chain_star(4, 7), 0), cfg);
  CHECK(b5 > b3);
  CHECK(std::abs((b7 - b5) - (b5 - b3)) <= 1);

  // Measured against the embedding of a path rooted at one end, where the
  // deepest point realizes the longest path.
  PrecisionScope scope(512);
  CombinatorialConfig path_cfg;
  path_cfg.tau = 5.0;
  const auto t = bfs_tree(path_graph(12), 0);
  auto e = embed_tree<BigFloat>(t, path_cfg);
  BigFloat max_norm(0.0);
  for (std::size_t i = 0; i < e.size(); ++i) max_norm = std::max(max_norm, sqrt(norm2<BigFloat>(e.points.row(i))));
  const double measured = -to_double(log2(BigFloat(1.0) - max_norm));
  const int estimate = required_precision(t, path_cfg);
  CHECK(measured <= 2.0 * estimate);
  CHECK(estimate <= 2.0 * measured);

  CHECK_THROWS_AS(embed_tree<double>(bfs_tree(chain_star(4, 5), 0), cfg), PrecisionError);
  PrecisionScope low(32);
  try {
    embed_tree<BigFloat>(bfs_tree(chain_star(4, 5), 0), cfg);
    FAIL("expected a precision error");
  } catch (const PrecisionError& err) {
    CHECK(err.required_bits() == required_precision(bfs_tree(chain_star(4, 5), 0), cfg));
    CHECK(std::string(err.what()).find("bits") != std::string::npos);
  }
}

TEST_CASE("halving precision does not improve distortion") {
  const Graph g = balanced_tree(2, 4);
  const auto t = bfs_tree(g, 0);
  CombinatorialConfig cfg;
  cfg.epsilon = 0.1;
  double prev = -1;
  for (int bits : {512, 256, 128, 64}) {
    PrecisionScope scope(bits);
    double dist;
    try {
      auto e = embed_tree<BigFloat>(t, cfg);
      dist = distortion_avg(shortest_path_matrix<BigFloat>(g), embedded_distances(e), e.scale);
    } catch (const PrecisionError&) {
      dist = INFINITY;
    }
    CHECK(dist >= prev - 1e-12);
    prev = dist;
  }
}

TEST_CASE("embed_tree agrees with step-by-step placement in 2d") {
  PrecisionScope scope(256);
  const auto t = bfs_tree(balanced_tree(3, 3), 0);
  CombinatorialConfig cfg;
  const auto e = embed_tree<BigFloat>(t, cfg);
  const BigFloat tau(e.scale);
  Matrix<BigFloat> pts(e.size(), 2);
  for (std::size_t a : t.order) {
    if (t.children[a].empty()) continue;
    std::optional<std::span<const BigFloat>> gp;
    if (t.parent[a] != kNoNode) gp = pts.row(t.parent[a]);
    auto kids = place_children_2d<BigFloat>(pts.row(a), gp, t.children[a].size(), tau);
    for (std::size_t i = 0; i < kids.size(); ++i)
      std::copy(kids[i].begin(), kids[i].end(), pts.row(t.children[a][i]).begin());
  }
  double worst = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(to_double(pts(i, j) - e.points(i, j))));
  CHECK(worst < 1e-60);
}

TEST_CASE("embed_tree succeeds at the estimated precision") {
  const auto t = bfs_tree(path_graph(300), 0);
  CombinatorialConfig cfg;
  const int need = required_precision(t, cfg);
  {
    PrecisionScope scope(need + 8);
    const auto e = embed_tree<BigFloat>(t, cfg);
    const auto d = embedded_distances(e);
    // 8 spare bits leave an absolute error of order 2^-8 at the deepest node.
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(std::abs(d(0, i) - e.scale * i) < 0.05);
  }
  PrecisionScope low(need / 2);
  CHECK_THROWS_AS(embed_tree<BigFloat>(t, cfg), PrecisionError);
}
