/* Plain C user of the public header. */
#include <stdio.h>
#include <string.h>

#include "hypembed/hypembed.h"

int main(void) {
  hyp_context* ctx = NULL;
  hyp_graph* g = NULL;
  hyp_embedding* e = NULL;
  hyp_tree_options opts;
  hyp_fidelity f;
  const int params[2] = {2, 3};
  if (hyp_context_create(&ctx) != HYP_OK) return 1;
  if (hyp_context_set_precision(ctx, 256) != HYP_OK) return 1;
  if (hyp_graph_generate(ctx, "balanced_tree", params, 2, &g) != HYP_OK) return 1;
  hyp_tree_options_default(&opts);
  if (hyp_embed_tree(ctx, g, &opts, &e) != HYP_OK) {
    fprintf(stderr, "%s\n", hyp_last_error(ctx));
    return 1;
  }
  if (hyp_evaluate(ctx, g, NULL, e, 2, &f) != HYP_OK || f.map != 1.0) return 1;
  if (hyp_graph_from_edge_list(ctx, "a\tb\nb\tc\tx\n", &g) != HYP_ERR_INPUT) return 1;
  if (strstr(hyp_last_error(ctx), "line 2") == NULL) return 1;
  printf("map %.3f distortion %.4f\n", f.map, f.distortion_avg);
  hyp_embedding_destroy(e);
  hyp_graph_destroy(g);
  hyp_context_destroy(ctx);
  return 0;
}
