#include "doctest.h"
#include "hypembed/combinatorial.hpp"
#include "hypembed/io.hpp"

using namespace hypembed;

TEST_CASE("embedding TSV round trip in double") {
  Embedding<double> e{{"a", "b"}, Matrix<double>(2, 2), "hmds", 1.0, 53};
  e.points(0, 0) = 0.1;
  e.points(1, 1) = -1.0 / 3.0;
  const std::string text = write_embedding_tsv(e);
  CHECK(text.rfind("# method=hmds dim=2 scale=", 0) == 0);
  CHECK(text.find("precision=53") != std::string::npos);
  const auto back = read_embedding_tsv<double>(text);
  CHECK(back.labels == e.labels);
  CHECK(back.points.data() == e.points.data());
  CHECK(back.method == "hmds");
  CHECK(back.precision == 53);
  CHECK(write_embedding_tsv(back) == text);
}

TEST_CASE("embedding TSV round trip at high precision") {
  PrecisionScope ps(512);
  const auto t = bfs_tree(balanced_tree(2, 3), 0);
  CombinatorialConfig cfg;
  auto e = embed_tree<BigFloat>(t, cfg);
  const std::string text = write_embedding_tsv(e);
  // ceil(512 log10 2) + 2 = 157 significant digits.
  const auto first_row = text.substr(text.find('\n') + 1);
  const auto coord = first_row.substr(first_row.find('\t') + 1, first_row.find_first_of("\t\n", first_row.find('\t') + 1) - first_row.find('\t') - 1);
  CHECK(coord.substr(0, coord.find('e')).size() == 158 + (coord[0] == '-'));
  const auto back = read_embedding_tsv<BigFloat>(text);
  CHECK(back.scale == e.scale);
  CHECK(back.precision == 512);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.dim(); ++j) CHECK(back.points(i, j) == e.points(i, j));
}

TEST_CASE("embedding TSV errors") {
  CHECK_THROWS_AS(read_embedding_tsv<double>(""), InputError);
  CHECK_THROWS_WITH_AS(read_embedding_tsv<double>("a\t0.1\t0.2\nb\t0.3\n"), doctest::Contains("line 2"), InputError);
  CHECK_THROWS_WITH_AS(read_embedding_tsv<double>("a\t0.1\na\t0.2\n"), doctest::Contains("duplicate"), InputError);
  CHECK_THROWS_WITH_AS(read_embedding_tsv<double>("a\t1.0\n"), doctest::Contains("unit ball"), InputError);
  CHECK_THROWS_WITH_AS(read_embedding_tsv<double>("a\tx\n"), doctest::Contains("not a number"), InputError);
  CHECK_THROWS_AS(read_embedding_tsv<double>("# dim=3\na\t0.1\n"), InputError);
  const auto e = read_embedding_tsv<double>("a\t0.5\n");
  CHECK(e.method == "unknown");
  CHECK(e.scale == 1.0);
}

TEST_CASE("distance TSV round trip") {
  const Graph g = balanced_tree(2, 2);
  auto d = shortest_path_matrix<double>(g);
  const std::string text = write_distance_tsv(d);
  CHECK(text.rfind("0\t1\t2", 0) == 0);
  CHECK(text.find("\n1\t1\t0\t2\t") != std::string::npos);
  const auto back = read_distance_tsv<double>(text);
  CHECK(back.labels == d.labels);
  CHECK(back.d.data() == d.d.data());
  CHECK(back.mask.empty());

  const auto s = sample_matrix(d, g, 1.0, 3);
  const auto sback = read_distance_tsv<double>(write_distance_tsv(s));
  CHECK(sback.mask == s.mask);
  CHECK(write_distance_tsv(s).find("NA") != std::string::npos);

  DistanceMatrix<double> frac{{"x", "y"}, Matrix<double>(2, 2), {}};
  frac.d(0, 1) = frac.d(1, 0) = 0.1;
  CHECK(read_distance_tsv<double>(write_distance_tsv(frac)).d(0, 1) == 0.1);
}

TEST_CASE("distance TSV accepts unlabeled rows and a corner cell") {
  auto a = read_distance_tsv<double>("a\tb\n0\t1.5\n1.5\t0\n");
  CHECK(a.d(0, 1) == 1.5);
  auto b = read_distance_tsv<double>("\ta\tb\na\t0\t2\nb\t2\t0\n");
  CHECK(b.labels == std::vector<std::string>{"a", "b"});
}

TEST_CASE("distance TSV errors") {
  CHECK_THROWS_WITH_AS(read_distance_tsv<double>("a\tb\n0\t1\n2\t0\n"), doctest::Contains("not symmetric"), InputError);
  CHECK_THROWS_WITH_AS(read_distance_tsv<double>("a\tb\n1\t1\n1\t0\n"), doctest::Contains("diagonal"), InputError);
  CHECK_THROWS_WITH_AS(read_distance_tsv<double>("a\tb\n0\t-1\n-1\t0\n"), doctest::Contains("negative"), InputError);
  CHECK_THROWS_WITH_AS(read_distance_tsv<double>("a\tb\nb\t0\t1\na\t1\t0\n"), doctest::Contains("row label"),
                       InputError);
  CHECK_THROWS_AS(read_distance_tsv<double>("a\tb\n0\t1\n"), InputError);
  CHECK_THROWS_AS(read_distance_tsv<double>("a\tb\n0\tNA\n1\t0\n"), InputError);
}

TEST_CASE("looks_like_distance_tsv") {
  CHECK(looks_like_distance_tsv(write_distance_tsv(shortest_path_matrix<double>(path_graph(4)))));
  CHECK_FALSE(looks_like_distance_tsv(to_edge_list(path_graph(4))));
  CHECK_FALSE(looks_like_distance_tsv(to_edge_list(cycle_graph(3))));
  CHECK_FALSE(looks_like_distance_tsv("0\t1\n1\t2\n0\t2\n"));
}
