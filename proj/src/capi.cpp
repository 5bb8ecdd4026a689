#include "hypembed/hypembed.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <variant>

#include "hypembed/combinatorial.hpp"
#include "hypembed/errors.hpp"
#include "hypembed/hmds.hpp"
#include "hypembed/io.hpp"
#include "hypembed/metrics.hpp"
#include "hypembed/optim.hpp"
#include "hypembed/pga.hpp"
#include "json.hpp"

using namespace hypembed;

struct hyp_context {
  int bits = 53;
  std::string error;
  int required_bits = 0;
};

struct hyp_graph {
  Graph g;
};

struct hyp_distances {
  std::variant<DistanceMatrix<double>, DistanceMatrix<BigFloat>> v;
};

struct hyp_embedding {
  std::variant<Embedding<double>, Embedding<BigFloat>> v;
};

namespace {

constexpr int kDoubleBits = 53;
constexpr int kMinBits = 8;
constexpr int kMaxBits = 1 << 20;

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class... P>
void require_non_null(const P*... p) {
  if (((p == nullptr) || ...)) throw InputError("null argument");
}

// Runs f at the context's precision and maps exceptions to status codes.
template <class F>
hyp_status guard(hyp_context* ctx, F&& f) {
  if (!ctx) return HYP_ERR_INPUT;
  ctx->error.clear();
  ctx->required_bits = 0;
  try {
    std::optional<PrecisionScope> scope;
    if (ctx->bits != kDoubleBits) scope.emplace(ctx->bits);
    f();
    return HYP_OK;
  } catch (const PrecisionError& e) {
    ctx->error = e.what();
    ctx->required_bits = e.required_bits();
    return HYP_ERR_NUMERIC;
  } catch (const NumericalError& e) {
    ctx->error = e.what();
    return HYP_ERR_NUMERIC;
  } catch (const InputError& e) {
    ctx->error = e.what();
    return HYP_ERR_INPUT;
  } catch (const std::exception& e) {
    ctx->error = std::string("internal error: ") + e.what();
    return HYP_ERR_INTERNAL;
  } catch (...) {
    ctx->error = "internal error";
    return HYP_ERR_INTERNAL;
  }
}

// Calls f with a std::type_identity of the context's scalar type.
template <class F>
void dispatch(const hyp_context* ctx, F&& f) {
  if (ctx->bits == kDoubleBits) f(std::type_identity<double>{});
  else f(std::type_identity<BigFloat>{});
}

template <Real R>
DistanceMatrix<R> distances_as(const hyp_distances* d) {
  return std::visit(
      [](const auto& m) -> DistanceMatrix<R> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DistanceMatrix<R>> && std::is_same_v<R, double>) return m;
        else return convert_distances<R>(m);
      },
      d->v);
}

template <Real R>
Embedding<R> embedding_as(const hyp_embedding* e) {
  return std::visit(
      [](const auto& src) -> Embedding<R> {
        using E = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<E, Embedding<R>> && std::is_same_v<R, double>) {
          return src;
        } else {
          Embedding<R> out{src.labels, convert_matrix<R>(src.points), src.method, src.scale, src.precision};
          if constexpr (std::is_same_v<R, BigFloat>) out.precision = std::min(src.precision, working_precision());
          return out;
        }
      },
      e->v);
}

// truth reordered to the graph's labels.
template <Real R>
DistanceMatrix<R> align_distances(const DistanceMatrix<R>& d, const Graph& g) {
  const std::size_t n = g.size();
  if (d.size() != n) {
    throw InputError("distance matrix has " + std::to_string(d.size()) + " labels but the graph has " +
                     std::to_string(n) + " nodes");
  }
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos.emplace(d.labels[i], i);
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = pos.find(g.label(i));
    if (it == pos.end()) throw InputError("distance matrix has no row for node '" + g.label(i) + "'");
    map[i] = it->second;
  }
  DistanceMatrix<R> out{g.labels(), Matrix<R>(n, n), {}};
  if (!d.mask.empty()) out.mask.assign(n * n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out.d(i, j) = d.d(map[i], map[j]);
      if (!d.mask.empty()) out.mask[i * n + j] = d.mask[map[i] * n + map[j]];
    }
  return out;
}

WeightedTree tree_for(const Graph& g, const hyp_tree_options& o) {
  if (o.root >= g.size()) {
    throw InputError("root " + std::to_string(o.root) + " is out of range for a graph with " +
                     std::to_string(g.size()) + " nodes");
  }
  WeightedTree t = bfs_tree(g, o.root);
  if (o.closure_base > 0) t = closure_weights(t, o.closure_base);
  return t;
}

CombinatorialConfig tree_config(const hyp_tree_options& o) {
  CombinatorialConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.tau = o.tau;
  cfg.dim = o.dim;
  cfg.force_code = o.force_code != 0;
  return cfg;
}

template <class V>
nlohmann::json json_array(const std::vector<V>& v) {
  auto out = nlohmann::json::array();
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace

extern "C" {

const char* hyp_version(void) { return "0.1.0"; }

void hyp_string_free(char* s) { std::free(s); }

hyp_status hyp_context_create(hyp_context** out) {
  if (!out) return HYP_ERR_INPUT;
  *out = new (std::nothrow) hyp_context();
  return *out ? HYP_OK : HYP_ERR_INTERNAL;
}

void hyp_context_destroy(hyp_context* ctx) { delete ctx; }

hyp_status hyp_context_set_precision(hyp_context* ctx, int bits) {
  return guard(ctx, [&] {
    if (bits < kMinBits || bits > kMaxBits) {
      throw InputError("precision must be between " + std::to_string(kMinBits) + " and " +
                       std::to_string(kMaxBits) + " bits, got " + std::to_string(bits));
    }
    ctx->bits = bits;
  });
}

int hyp_context_precision(const hyp_context* ctx) { return ctx ? ctx->bits : 0; }

const char* hyp_last_error(const hyp_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }

int hyp_last_required_bits(const hyp_context* ctx) { return ctx ? ctx->required_bits : 0; }

// ---- graphs ----

hyp_status hyp_graph_from_edge_list(hyp_context* ctx, const char* text, hyp_graph** out) {
  return guard(ctx, [&] {
    require_non_null(text, out);
    *out = new hyp_graph{load_edge_list(text)};
  });
}

hyp_status hyp_graph_generate(hyp_context* ctx, const char* kind, const int* params, size_t count, hyp_graph** out) {
  return guard(ctx, [&] {
    require_non_null(kind, out);
    if (count > 0) require_non_null(params);
    std::vector<int> p(params, params + count);
    *out = new hyp_graph{gen_fixture(kind, p)};
  });
}

hyp_status hyp_graph_to_edge_list(hyp_context* ctx, const hyp_graph* g, char** out) {
  return guard(ctx, [&] {
    require_non_null(g, out);
    *out = copy_string(to_edge_list(g->g));
  });
}

size_t hyp_graph_size(const hyp_graph* g) { return g ? g->g.size() : 0; }
size_t hyp_graph_edge_count(const hyp_graph* g) { return g ? g->g.edges().size() : 0; }
int hyp_graph_is_tree(const hyp_graph* g) { return g && g->g.is_tree() ? 1 : 0; }
void hyp_graph_destroy(hyp_graph* g) { delete g; }

// ---- distances ----

hyp_status hyp_distances_from_graph(hyp_context* ctx, const hyp_graph* g, hyp_distances** out) {
  return guard(ctx, [&] {
    require_non_null(g, out);
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      *out = new hyp_distances{shortest_path_matrix<T>(g->g)};
    });
  });
}

hyp_status hyp_distances_read_tsv(hyp_context* ctx, const char* text, hyp_distances** out) {
  return guard(ctx, [&] {
    require_non_null(text, out);
    dispatch(ctx, [&]<class T>(std::type_identity<T>) { *out = new hyp_distances{read_distance_tsv<T>(text)}; });
  });
}

hyp_status hyp_distances_write_tsv(hyp_context* ctx, const hyp_distances* d, char** out) {
  return guard(ctx, [&] {
    require_non_null(d, out);
    *out = copy_string(std::visit([](const auto& m) { return write_distance_tsv(m); }, d->v));
  });
}

hyp_status hyp_distances_sample(hyp_context* ctx, const hyp_distances* d, const hyp_graph* g, double ratio,
                                uint64_t seed, hyp_distances** out) {
  return guard(ctx, [&] {
    require_non_null(d, g, out);
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      *out = new hyp_distances{sample_matrix(align_distances(distances_as<T>(d), g->g), g->g, ratio, seed)};
    });
  });
}

hyp_status hyp_distances_complete(hyp_context* ctx, const hyp_distances* d, hyp_distances** out) {
  return guard(ctx, [&] {
    require_non_null(d, out);
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      *out = new hyp_distances{complete_matrix(distances_as<T>(d))};
    });
  });
}

int hyp_text_is_distance_tsv(const char* text) { return text && looks_like_distance_tsv(text) ? 1 : 0; }

size_t hyp_distances_size(const hyp_distances* d) {
  return d ? std::visit([](const auto& m) { return m.size(); }, d->v) : 0;
}

size_t hyp_distances_observed_pairs(const hyp_distances* d) {
  return d ? std::visit([](const auto& m) { return m.observed_pairs(); }, d->v) : 0;
}

hyp_status hyp_distances_get(hyp_context* ctx, const hyp_distances* d, size_t i, size_t j, double* out) {
  return guard(ctx, [&] {
    require_non_null(d, out);
    std::visit(
        [&](const auto& m) {
          if (i >= m.size() || j >= m.size()) throw InputError("distance index out of range");
          if (!m.observed(i, j)) throw InputError("distance entry is not observed");
          *out = to_double(m.d(i, j));
        },
        d->v);
  });
}

void hyp_distances_destroy(hyp_distances* d) { delete d; }

// ---- embeddings ----

hyp_status hyp_embedding_read_tsv(hyp_context* ctx, const char* text, hyp_embedding** out) {
  return guard(ctx, [&] {
    require_non_null(text, out);
    dispatch(ctx, [&]<class T>(std::type_identity<T>) { *out = new hyp_embedding{read_embedding_tsv<T>(text)}; });
  });
}

hyp_status hyp_embedding_write_tsv(hyp_context* ctx, const hyp_embedding* e, char** out) {
  return guard(ctx, [&] {
    require_non_null(e, out);
    *out = copy_string(std::visit([](const auto& m) { return write_embedding_tsv(m); }, e->v));
  });
}

size_t hyp_embedding_size(const hyp_embedding* e) {
  return e ? std::visit([](const auto& m) { return m.size(); }, e->v) : 0;
}

int hyp_embedding_dim(const hyp_embedding* e) {
  return e ? static_cast<int>(std::visit([](const auto& m) { return m.dim(); }, e->v)) : 0;
}

double hyp_embedding_scale(const hyp_embedding* e) {
  return e ? std::visit([](const auto& m) { return m.scale; }, e->v) : 0.0;
}

int hyp_embedding_precision(const hyp_embedding* e) {
  return e ? std::visit([](const auto& m) { return m.precision; }, e->v) : 0;
}

const char* hyp_embedding_method(const hyp_embedding* e) {
  return e ? std::visit([](const auto& m) { return m.method.c_str(); }, e->v) : nullptr;
}

const char* hyp_embedding_label(const hyp_embedding* e, size_t i) {
  if (!e) return nullptr;
  return std::visit([&](const auto& m) { return i < m.size() ? m.labels[i].c_str() : nullptr; }, e->v);
}

hyp_status hyp_embedding_coord(hyp_context* ctx, const hyp_embedding* e, size_t i, int j, double* out) {
  return guard(ctx, [&] {
    require_non_null(e, out);
    std::visit(
        [&](const auto& m) {
          if (i >= m.size() || j < 0 || static_cast<std::size_t>(j) >= m.dim()) {
            throw InputError("embedding index out of range");
          }
          *out = to_double(m.points(i, static_cast<std::size_t>(j)));
        },
        e->v);
  });
}

void hyp_embedding_destroy(hyp_embedding* e) { delete e; }

// ---- combinatorial ----

void hyp_tree_options_default(hyp_tree_options* opts) {
  if (!opts) return;
  const CombinatorialConfig cfg;
  *opts = {cfg.epsilon, cfg.tau, cfg.dim, 0, 0.0, 0};
}

hyp_status hyp_embed_tree(hyp_context* ctx, const hyp_graph* g, const hyp_tree_options* opts, hyp_embedding** out) {
  return guard(ctx, [&] {
    require_non_null(g, opts, out);
    const WeightedTree t = tree_for(g->g, *opts);
    const CombinatorialConfig cfg = tree_config(*opts);
    dispatch(ctx, [&]<class T>(std::type_identity<T>) { *out = new hyp_embedding{embed_tree<T>(t, cfg)}; });
  });
}

hyp_status hyp_tree_required_precision(hyp_context* ctx, const hyp_graph* g, const hyp_tree_options* opts,
                                       int* bits) {
  return guard(ctx, [&] {
    require_non_null(g, opts, bits);
    *bits = required_precision(tree_for(g->g, *opts), tree_config(*opts));
  });
}

// ---- h-MDS ----

void hyp_hmds_options_default(hyp_hmds_options* opts) {
  if (opts) *opts = {2, HYP_RECENTER_KARCHER};
}

hyp_status hyp_embed_hmds(hyp_context* ctx, const hyp_distances* d, const hyp_hmds_options* opts,
                          hyp_embedding** out, char** report_json) {
  return guard(ctx, [&] {
    require_non_null(d, opts, out);
    HmdsOptions ho;
    switch (opts->recenter) {
      case HYP_RECENTER_NONE: ho.recenter = Recenter::none; break;
      case HYP_RECENTER_KARCHER: ho.recenter = Recenter::karcher; break;
      case HYP_RECENTER_PSEUDO_EUCLIDEAN: ho.recenter = Recenter::pseudo_euclidean; break;
      default: throw InputError("unknown recentering mode");
    }
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      auto res = run_hmds(distances_as<T>(d), opts->rank, ho);
      if (report_json) {
        nlohmann::json j;
        j["rank"] = opts->rank;
        j["recenter"] = recenter_name(ho.recenter);
        j["eigenvalues"] = json_array(res.eigenvalues);
        j["kept"] = res.kept;
        j["residual"] = to_double(res.residual);
        j["centered_norm"] = to_double(res.centered_norm);
        j["warnings"] = res.warnings;
        *report_json = copy_string(j.dump(2) + "\n");
      }
      *out = new hyp_embedding{std::move(res.embedding)};
    });
  });
}

// ---- SGD ----

void hyp_sgd_options_default(hyp_sgd_options* opts) {
  if (!opts) return;
  const SgdConfig cfg;
  *opts = {cfg.rank, cfg.epochs, cfg.lr, cfg.tau_init, cfg.tau_min, cfg.beta, cfg.seed};
}

hyp_status hyp_embed_sgd(hyp_context* ctx, const hyp_distances* d, const hyp_sgd_options* opts,
                         const hyp_embedding* warm, hyp_embedding** out, char** loss_trace_csv) {
  return guard(ctx, [&] {
    require_non_null(d, opts, out);
    SgdConfig cfg;
    cfg.rank = opts->rank;
    cfg.epochs = opts->epochs;
    cfg.lr = opts->lr;
    cfg.tau_init = opts->tau_init;
    cfg.tau_min = opts->tau_min;
    cfg.beta = opts->beta;
    cfg.seed = opts->seed;
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      std::optional<Embedding<T>> start;
      if (warm) start = embedding_as<T>(warm);
      auto res = sgd_embed(distances_as<T>(d), cfg, start ? &*start : nullptr);
      if (loss_trace_csv) {
        std::ostringstream s;
        s << "epoch,loss\n";
        for (std::size_t k = 0; k < res.loss_trace.size(); ++k) s << k << ',' << format_real(res.loss_trace[k]) << '\n';
        *loss_trace_csv = copy_string(s.str());
      }
      *out = new hyp_embedding{std::move(res.embedding)};
    });
  });
}

// ---- PGA ----

void hyp_pga_options_default(hyp_pga_options* opts) {
  if (!opts) return;
  const PgaOptions po;
  *opts = {po.restarts, po.seed};
}

hyp_status hyp_reduce_pga(hyp_context* ctx, const hyp_embedding* e, const hyp_pga_options* opts, char** report_json) {
  return guard(ctx, [&] {
    require_non_null(e, opts, report_json);
    PgaOptions po;
    po.restarts = opts->restarts;
    po.seed = opts->seed;
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      const auto emb = embedding_as<T>(e);
      const auto prob = pga_prepare(emb.points);
      const auto fit = fit_geodesic(prob, po);
      const auto proj = project_to_geodesic<T>(prob, fit.direction);
      const auto cert = convexity_certificate<T>(fit.direction, prob);
      nlohmann::json j;
      j["mean"] = json_array(prob.mean);
      j["direction"] = json_array(fit.direction);
      j["loss"] = to_double(fit.loss);
      j["gradient_norm"] = to_double(fit.gradient_norm);
      j["converged"] = fit.converged;
      j["restarts"] = fit.restarts;
      j["best_restart"] = fit.best_restart;
      j["restart_losses"] = json_array(fit.restart_losses);
      j["convexity_certified"] = cert.certified;
      auto pts = nlohmann::json::array();
      for (std::size_t i = 0; i < proj.size(); ++i) {
        pts.push_back({{"label", emb.labels[i]},
                       {"coordinate", to_double(proj[i].coordinate)},
                       {"residual", to_double(proj[i].residual)},
                       {"certified", static_cast<bool>(cert.per_point[i])}});
      }
      j["points"] = std::move(pts);
      *report_json = copy_string(j.dump(2) + "\n");
    });
  });
}

// ---- metrics ----

hyp_status hyp_evaluate(hyp_context* ctx, const hyp_graph* g, const hyp_distances* truth, const hyp_embedding* e,
                        int k_hops, hyp_fidelity* out) {
  return guard(ctx, [&] {
    require_non_null(g, e, out);
    if (k_hops < 1) throw InputError("k_hops must be at least 1");
    dispatch(ctx, [&]<class T>(std::type_identity<T>) {
      const DistanceMatrix<T> t =
          truth ? align_distances(distances_as<T>(truth), g->g) : shortest_path_matrix<T>(g->g);
      if (!t.fully_observed()) throw InputError("ground-truth distances must be fully observed");
      const auto rep = evaluate(g->g, t, embedding_as<T>(e), k_hops);
      *out = {rep.map, rep.k_map, rep.k_hops, rep.distortion_avg, rep.distortion_wc, rep.n, rep.pairs};
    });
  });
}

}  // extern "C"
