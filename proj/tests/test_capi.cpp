#include <cmath>
#include <string>

#include "doctest.h"
#include "hypembed/hypembed.h"
#include "json.hpp"

namespace {

struct Ctx {
  hyp_context* c = nullptr;
  Ctx() { REQUIRE(hyp_context_create(&c) == HYP_OK); }
  ~Ctx() { hyp_context_destroy(c); }
};

std::string take(char* s) {
  std::string out(s);
  hyp_string_free(s);
  return out;
}

hyp_graph* gen(hyp_context* c, const char* kind, std::initializer_list<int> p) {
  hyp_graph* g = nullptr;
  REQUIRE(hyp_graph_generate(c, kind, p.begin(), p.size(), &g) == HYP_OK);
  return g;
}

}  // namespace

TEST_CASE("context and errors") {
  Ctx ctx;
  CHECK(hyp_context_precision(ctx.c) == 53);
  CHECK(hyp_context_set_precision(ctx.c, 4) == HYP_ERR_INPUT);
  CHECK(std::string(hyp_last_error(ctx.c)).find("precision") != std::string::npos);
  CHECK(hyp_context_precision(ctx.c) == 53);
  CHECK(hyp_context_set_precision(ctx.c, 256) == HYP_OK);
  CHECK(std::string(hyp_last_error(ctx.c)).empty());
  CHECK(hyp_context_precision(ctx.c) == 256);
  hyp_graph* g = nullptr;
  CHECK(hyp_graph_from_edge_list(ctx.c, nullptr, &g) == HYP_ERR_INPUT);
  CHECK(hyp_graph_from_edge_list(ctx.c, "a\tb\nb\tb\n", &g) == HYP_ERR_INPUT);
  CHECK(std::string(hyp_last_error(ctx.c)).find("line 2") != std::string::npos);
  CHECK(hyp_graph_generate(ctx.c, "nope", nullptr, 0, &g) == HYP_ERR_INPUT);
  CHECK(g == nullptr);
  CHECK(hyp_graph_from_edge_list(nullptr, "a\tb\n", &g) == HYP_ERR_INPUT);
  CHECK(std::string(hyp_version()) == "0.1.0");
}

TEST_CASE("graphs and distance files") {
  Ctx ctx;
  hyp_graph* g = gen(ctx.c, "balanced_tree", {2, 2});
  CHECK(hyp_graph_size(g) == 7);
  CHECK(hyp_graph_edge_count(g) == 6);
  CHECK(hyp_graph_is_tree(g) == 1);
  char* text = nullptr;
  REQUIRE(hyp_graph_to_edge_list(ctx.c, g, &text) == HYP_OK);
  const std::string edges = take(text);
  hyp_graph* g2 = nullptr;
  REQUIRE(hyp_graph_from_edge_list(ctx.c, edges.c_str(), &g2) == HYP_OK);
  CHECK(hyp_graph_size(g2) == 7);
  CHECK(hyp_text_is_distance_tsv(edges.c_str()) == 0);

  hyp_distances* d = nullptr;
  REQUIRE(hyp_distances_from_graph(ctx.c, g, &d) == HYP_OK);
  double v = 0;
  REQUIRE(hyp_distances_get(ctx.c, d, 3, 6, &v) == HYP_OK);
  CHECK(v == 4.0);
  CHECK(hyp_distances_get(ctx.c, d, 3, 7, &v) == HYP_ERR_INPUT);

  hyp_distances* s = nullptr;
  REQUIRE(hyp_distances_sample(ctx.c, d, g, 0.5, 1, &s) == HYP_OK);
  CHECK(hyp_distances_observed_pairs(s) == 6 + 3);
  REQUIRE(hyp_distances_write_tsv(ctx.c, s, &text) == HYP_OK);
  const std::string tsv = take(text);
  CHECK(hyp_text_is_distance_tsv(tsv.c_str()) == 1);
  hyp_distances* back = nullptr;
  REQUIRE(hyp_distances_read_tsv(ctx.c, tsv.c_str(), &back) == HYP_OK);
  hyp_distances* full = nullptr;
  REQUIRE(hyp_distances_complete(ctx.c, back, &full) == HYP_OK);
  CHECK(hyp_distances_observed_pairs(full) == 21);
  for (size_t i = 0; i < 7; ++i)
    for (size_t j = 0; j < 7; ++j) {
      double a = 0, b = 0;
      REQUIRE(hyp_distances_get(ctx.c, full, i, j, &a) == HYP_OK);
      REQUIRE(hyp_distances_get(ctx.c, d, i, j, &b) == HYP_OK);
      CHECK(a == b);
    }
  for (auto* x : {d, s, back, full}) hyp_distances_destroy(x);
  hyp_graph_destroy(g);
  hyp_graph_destroy(g2);
}

TEST_CASE("tree embedding and evaluation") {
  Ctx ctx;
  REQUIRE(hyp_context_set_precision(ctx.c, 256) == HYP_OK);
  hyp_graph* g = gen(ctx.c, "balanced_tree", {3, 3});
  hyp_tree_options o;
  hyp_tree_options_default(&o);
  CHECK(o.epsilon == 0.1);
  CHECK(o.dim == 2);
  hyp_embedding* e = nullptr;
  REQUIRE(hyp_embed_tree(ctx.c, g, &o, &e) == HYP_OK);
  CHECK(hyp_embedding_size(e) == 40);
  CHECK(hyp_embedding_dim(e) == 2);
  CHECK(hyp_embedding_precision(e) == 256);
  CHECK(std::string(hyp_embedding_method(e)) == "combinatorial");
  CHECK(std::string(hyp_embedding_label(e, 39)) == "39");
  CHECK(hyp_embedding_label(e, 40) == nullptr);
  CHECK(hyp_embedding_scale(e) > 1);
  double x = 1;
  REQUIRE(hyp_embedding_coord(ctx.c, e, 0, 0, &x) == HYP_OK);
  CHECK(x == 0.0);
  CHECK(hyp_embedding_coord(ctx.c, e, 0, 2, &x) == HYP_ERR_INPUT);

  hyp_fidelity f;
  REQUIRE(hyp_evaluate(ctx.c, g, nullptr, e, 2, &f) == HYP_OK);
  CHECK(f.map == 1.0);
  CHECK(f.k_map == 1.0);
  CHECK(f.n == 40);
  CHECK(f.pairs == 780);
  CHECK(f.distortion_wc <= 1.1);

  // Round trip through text keeps the evaluation identical.
  char* text = nullptr;
  REQUIRE(hyp_embedding_write_tsv(ctx.c, e, &text) == HYP_OK);
  hyp_embedding* e2 = nullptr;
  REQUIRE(hyp_embedding_read_tsv(ctx.c, take(text).c_str(), &e2) == HYP_OK);
  hyp_fidelity f2;
  REQUIRE(hyp_evaluate(ctx.c, g, nullptr, e2, 2, &f2) == HYP_OK);
  CHECK(f2.distortion_avg == f.distortion_avg);
  CHECK(f2.distortion_wc == f.distortion_wc);
  CHECK(hyp_evaluate(ctx.c, g, nullptr, e2, 0, &f2) == HYP_ERR_INPUT);

  hyp_graph* other = gen(ctx.c, "path", {3});
  CHECK(hyp_evaluate(ctx.c, other, nullptr, e, 2, &f2) == HYP_OK);  // labels 0..2 exist
  hyp_graph* big = gen(ctx.c, "path", {41});
  CHECK(hyp_evaluate(ctx.c, big, nullptr, e, 2, &f2) == HYP_ERR_INPUT);
  CHECK(std::string(hyp_last_error(ctx.c)).find("'40'") != std::string::npos);
  for (auto* h : {g, other, big}) hyp_graph_destroy(h);
  hyp_embedding_destroy(e);
  hyp_embedding_destroy(e2);
}

TEST_CASE("precision underflow reports the bits needed") {
  Ctx ctx;
  REQUIRE(hyp_context_set_precision(ctx.c, 32) == HYP_OK);
  hyp_graph* g = gen(ctx.c, "path", {200});
  hyp_tree_options o;
  hyp_tree_options_default(&o);
  hyp_embedding* e = nullptr;
  CHECK(hyp_embed_tree(ctx.c, g, &o, &e) == HYP_ERR_NUMERIC);
  int need = 0;
  const int reported = hyp_last_required_bits(ctx.c);
  REQUIRE(hyp_tree_required_precision(ctx.c, g, &o, &need) == HYP_OK);
  CHECK(reported == need);
  CHECK(need > 32);
  REQUIRE(hyp_context_set_precision(ctx.c, need + 64) == HYP_OK);
  REQUIRE(hyp_embed_tree(ctx.c, g, &o, &e) == HYP_OK);
  hyp_embedding_destroy(e);

  o.root = 200;
  CHECK(hyp_embed_tree(ctx.c, g, &o, &e) == HYP_ERR_INPUT);
  hyp_graph_destroy(g);
}

TEST_CASE("h-MDS, SGD and PGA through the C API") {
  Ctx ctx;
  hyp_graph* g = gen(ctx.c, "balanced_tree", {2, 3});
  hyp_distances* d = nullptr;
  REQUIRE(hyp_distances_from_graph(ctx.c, g, &d) == HYP_OK);

  hyp_hmds_options ho;
  hyp_hmds_options_default(&ho);
  hyp_embedding* h = nullptr;
  char* rep = nullptr;
  REQUIRE(hyp_embed_hmds(ctx.c, d, &ho, &h, &rep) == HYP_OK);
  const auto j = nlohmann::json::parse(take(rep));
  CHECK(j["eigenvalues"].size() == 15);
  CHECK(j["rank"] == 2);
  CHECK(j["recenter"] == "karcher");
  CHECK(j.contains("residual"));
  CHECK(j.contains("centered_norm"));
  ho.rank = 15;
  hyp_embedding* bad = nullptr;
  CHECK(hyp_embed_hmds(ctx.c, d, &ho, &bad, nullptr) == HYP_ERR_INPUT);
  ho.rank = 2;
  ho.recenter = static_cast<hyp_recenter>(9);
  CHECK(hyp_embed_hmds(ctx.c, d, &ho, &bad, nullptr) == HYP_ERR_INPUT);

  hyp_sgd_options so;
  hyp_sgd_options_default(&so);
  so.epochs = 50;
  hyp_embedding* s = nullptr;
  char* trace = nullptr;
  REQUIRE(hyp_embed_sgd(ctx.c, d, &so, h, &s, &trace) == HYP_OK);
  const std::string csv = take(trace);
  CHECK(csv.rfind("epoch,loss\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);
  CHECK(std::string(hyp_embedding_method(s)) == "sgd");

  hyp_pga_options po;
  hyp_pga_options_default(&po);
  CHECK(po.restarts == 8);
  REQUIRE(hyp_reduce_pga(ctx.c, h, &po, &rep) == HYP_OK);
  const auto p = nlohmann::json::parse(take(rep));
  CHECK(p["direction"].size() == 2);
  CHECK(p["points"].size() == 15);
  CHECK(p["restart_losses"].size() == 9);
  const double norm = std::hypot(p["direction"][0].get<double>(), p["direction"][1].get<double>());
  CHECK(norm == doctest::Approx(1.0));

  hyp_embedding_destroy(h);
  hyp_embedding_destroy(s);
  hyp_distances_destroy(d);
  hyp_graph_destroy(g);
}

TEST_CASE("evaluate aligns ground truth by label") {
  Ctx ctx;
  hyp_graph* g = gen(ctx.c, "path", {4});
  hyp_distances* truth = nullptr;
  // Same metric with rows in a different order.
  REQUIRE(hyp_distances_read_tsv(ctx.c, "3\t0\t1\t2\n0\t3\t2\t1\n3\t0\t1\t2\n2\t1\t0\t1\n1\t2\t1\t0\n", &truth) ==
          HYP_OK);
  hyp_tree_options o;
  hyp_tree_options_default(&o);
  hyp_embedding* e = nullptr;
  REQUIRE(hyp_embed_tree(ctx.c, g, &o, &e) == HYP_OK);
  hyp_fidelity a, b;
  REQUIRE(hyp_evaluate(ctx.c, g, nullptr, e, 2, &a) == HYP_OK);
  REQUIRE(hyp_evaluate(ctx.c, g, truth, e, 2, &b) == HYP_OK);
  CHECK(a.distortion_avg == b.distortion_avg);
  CHECK(a.distortion_wc == b.distortion_wc);
  hyp_distances_destroy(truth);
  hyp_embedding_destroy(e);
  hyp_graph_destroy(g);
}
