#ifndef HYPEMBED_H
#define HYPEMBED_H

/* C interface to the hyperbolic embedding library.
 *
 * Every object is an opaque handle created by a hyp_* function and released
 * with the matching *_destroy call. Functions that can fail return a
 * hyp_status and leave a message in the context (hyp_last_error). Strings
 * returned through char** are owned by the caller and released with
 * hyp_string_free. A context is not thread safe; use one per thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HYP_API __declspec(dllexport)
#else
#define HYP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hyp_status {
  HYP_OK = 0,
  HYP_ERR_INPUT = 2,   /* malformed input or invalid parameter */
  HYP_ERR_NUMERIC = 3, /* numerical failure, including precision underflow */
  HYP_ERR_INTERNAL = 4
} hyp_status;

typedef struct hyp_context hyp_context;
typedef struct hyp_graph hyp_graph;
typedef struct hyp_distances hyp_distances;
typedef struct hyp_embedding hyp_embedding;

HYP_API const char* hyp_version(void);
HYP_API void hyp_string_free(char* s);

/* ---- context ---- */

/* New context at 53-bit (hardware double) precision. */
HYP_API hyp_status hyp_context_create(hyp_context** out);
HYP_API void hyp_context_destroy(hyp_context* ctx);
/* 53 selects hardware doubles; any other value in [8, 2^20] selects MPFR
 * arithmetic with that many mantissa bits. Applies to later calls only. */
HYP_API hyp_status hyp_context_set_precision(hyp_context* ctx, int bits);
HYP_API int hyp_context_precision(const hyp_context* ctx);
/* Message of the last failed call on ctx; "" after a successful call. */
HYP_API const char* hyp_last_error(const hyp_context* ctx);
/* Bits suggested by the last precision underflow, 0 otherwise. */
HYP_API int hyp_last_required_bits(const hyp_context* ctx);

/* ---- graphs ---- */

/* Tab-separated "u v [w]" lines; '#' comments. */
HYP_API hyp_status hyp_graph_from_edge_list(hyp_context* ctx, const char* text, hyp_graph** out);
/* kind: balanced_tree, chain_star, path, star, clique, steiner_star, cycle. */
HYP_API hyp_status hyp_graph_generate(hyp_context* ctx, const char* kind, const int* params, size_t count,
                                      hyp_graph** out);
HYP_API hyp_status hyp_graph_to_edge_list(hyp_context* ctx, const hyp_graph* g, char** out);
HYP_API size_t hyp_graph_size(const hyp_graph* g);
HYP_API size_t hyp_graph_edge_count(const hyp_graph* g);
HYP_API int hyp_graph_is_tree(const hyp_graph* g);
HYP_API void hyp_graph_destroy(hyp_graph* g);

/* ---- distance matrices ---- */

HYP_API hyp_status hyp_distances_from_graph(hyp_context* ctx, const hyp_graph* g, hyp_distances** out);
HYP_API hyp_status hyp_distances_read_tsv(hyp_context* ctx, const char* text, hyp_distances** out);
HYP_API hyp_status hyp_distances_write_tsv(hyp_context* ctx, const hyp_distances* d, char** out);
/* Keeps every edge pair plus floor(ratio * |E|) random non-edge pairs. */
HYP_API hyp_status hyp_distances_sample(hyp_context* ctx, const hyp_distances* d, const hyp_graph* g, double ratio,
                                        uint64_t seed, hyp_distances** out);
/* Fills unobserved entries with shortest paths through observed ones. */
HYP_API hyp_status hyp_distances_complete(hyp_context* ctx, const hyp_distances* d, hyp_distances** out);
/* 1 if text parses as a distance TSV, 0 otherwise. */
HYP_API int hyp_text_is_distance_tsv(const char* text);
HYP_API size_t hyp_distances_size(const hyp_distances* d);
HYP_API size_t hyp_distances_observed_pairs(const hyp_distances* d);
/* HYP_ERR_INPUT for an unobserved or out-of-range entry. */
HYP_API hyp_status hyp_distances_get(hyp_context* ctx, const hyp_distances* d, size_t i, size_t j, double* out);
HYP_API void hyp_distances_destroy(hyp_distances* d);

/* ---- embeddings ---- */

HYP_API hyp_status hyp_embedding_read_tsv(hyp_context* ctx, const char* text, hyp_embedding** out);
HYP_API hyp_status hyp_embedding_write_tsv(hyp_context* ctx, const hyp_embedding* e, char** out);
HYP_API size_t hyp_embedding_size(const hyp_embedding* e);
HYP_API int hyp_embedding_dim(const hyp_embedding* e);
/* d_H(f(u), f(v)) ~ scale * d(u, v). */
HYP_API double hyp_embedding_scale(const hyp_embedding* e);
HYP_API int hyp_embedding_precision(const hyp_embedding* e);
HYP_API const char* hyp_embedding_method(const hyp_embedding* e);
/* NULL when i is out of range. */
HYP_API const char* hyp_embedding_label(const hyp_embedding* e, size_t i);
HYP_API hyp_status hyp_embedding_coord(hyp_context* ctx, const hyp_embedding* e, size_t i, int j, double* out);
HYP_API void hyp_embedding_destroy(hyp_embedding* e);

/* Combinatorial tree embedding. Non-tree graphs are reduced to their BFS
 * tree from `root`. tau <= 0 derives tau from epsilon. closure_base > 0
 * reweights the edge from a depth-s node to its child to closure_base^s. */
typedef struct hyp_tree_options {
  double epsilon;
  double tau;
  int dim;
  size_t root;
  double closure_base;
  int force_code; /* 1 = use the hypercube code even in 2 dimensions */
} hyp_tree_options;

HYP_API void hyp_tree_options_default(hyp_tree_options* opts);
HYP_API hyp_status hyp_embed_tree(hyp_context* ctx, const hyp_graph* g, const hyp_tree_options* opts,
                                  hyp_embedding** out);
/* Mantissa bits the tree embedding needs, from its longest path and tau. */
HYP_API hyp_status hyp_tree_required_precision(hyp_context* ctx, const hyp_graph* g, const hyp_tree_options* opts,
                                               int* bits);

typedef enum hyp_recenter {
  HYP_RECENTER_NONE = 0,
  HYP_RECENTER_KARCHER = 1,
  HYP_RECENTER_PSEUDO_EUCLIDEAN = 2
} hyp_recenter;

typedef struct hyp_hmds_options {
  int rank;
  hyp_recenter recenter;
} hyp_hmds_options;

HYP_API void hyp_hmds_options_default(hyp_hmds_options* opts);
/* report_json, if not NULL, receives
 * {"rank", "recenter", "eigenvalues", "kept", "residual", "centered_norm", "warnings"}. */
HYP_API hyp_status hyp_embed_hmds(hyp_context* ctx, const hyp_distances* d, const hyp_hmds_options* opts,
                                  hyp_embedding** out, char** report_json);

typedef struct hyp_sgd_options {
  int rank;
  int epochs;
  double lr;
  double tau_init;
  double tau_min;
  double beta; /* pair weight exp(-beta * d); 0 disables weighting */
  uint64_t seed;
} hyp_sgd_options;

HYP_API void hyp_sgd_options_default(hyp_sgd_options* opts);
/* warm may be NULL. loss_trace_csv, if not NULL, receives "epoch,loss" rows. */
HYP_API hyp_status hyp_embed_sgd(hyp_context* ctx, const hyp_distances* d, const hyp_sgd_options* opts,
                                 const hyp_embedding* warm, hyp_embedding** out, char** loss_trace_csv);

typedef struct hyp_pga_options {
  int restarts;
  uint64_t seed;
} hyp_pga_options;

HYP_API void hyp_pga_options_default(hyp_pga_options* opts);
/* Fits the first principal geodesic through the Karcher mean. report_json
 * receives the mean, the unit direction in the frame where the mean is the
 * origin, loss, convergence, restart losses, the convexity certificate and
 * per-point coordinates and residuals. */
HYP_API hyp_status hyp_reduce_pga(hyp_context* ctx, const hyp_embedding* e, const hyp_pga_options* opts,
                                  char** report_json);

typedef struct hyp_fidelity {
  double map;   /* 1-hop MAP */
  double k_map; /* MAP with neighbors within k_hops */
  int k_hops;
  double distortion_avg;
  double distortion_wc;
  size_t n;
  size_t pairs;
} hyp_fidelity;

/* truth may be NULL, in which case the graph's shortest paths are used. */
HYP_API hyp_status hyp_evaluate(hyp_context* ctx, const hyp_graph* g, const hyp_distances* truth,
                                const hyp_embedding* e, int k_hops, hyp_fidelity* out);

#ifdef __cplusplus
}
#endif

#endif
