#pragma once

#include <string>
#include <vector>

#include "hypembed/embedding.hpp"
#include "hypembed/graph.hpp"

namespace hypembed {

struct FidelityReport {
  double map = 0;
  double k_map = 0;
  int k_hops = 2;
  double distortion_avg = 0;
  double distortion_wc = 1;
  std::size_t n = 0;
  std::size_t pairs = 0;
};

// Rows of e reordered to follow `labels`. Throws InputError naming the first
// label the embedding does not cover.
template <Real R>
Embedding<R> align_embedding(const Embedding<R>& e, const std::vector<std::string>& labels);

// All pairwise d_H of the embedded points, rounded to double.
template <Real R>
Matrix<double> embedded_distances(const Embedding<R>& e);

// Mean average precision of neighbour retrieval. Neighbours of a are the
// nodes within k_hops graph hops; the retrieval set for neighbour b is every
// other node in the closed ball of radius dist(a, b) around a. Nodes without
// neighbours are skipped.
double map_score(const Graph& g, const Matrix<double>& dist, int k_hops = 1);

// Mean of |dist/scale - d| / d over unordered pairs. Throws InputError on
// unobserved or nonpositive off-diagonal d.
template <Real R>
double distortion_avg(const DistanceMatrix<R>& truth, const Matrix<double>& dist, double scale = 1.0);

// max(dist/d) * max(d/dist) over unordered pairs; independent of any scale.
template <Real R>
double distortion_wc(const DistanceMatrix<R>& truth, const Matrix<double>& dist);

// Full report for an embedding of g. `truth` must be fully observed and use
// the same node order as g.
template <Real R>
FidelityReport evaluate(const Graph& g, const DistanceMatrix<R>& truth, const Embedding<R>& e, int k_hops = 2);

}  // namespace hypembed
