#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hypembed/embedding.hpp"
#include "hypembed/graph.hpp"

namespace hypembed {

struct SgdConfig {
  int rank = 2;
  int epochs = 1000;
  double lr = 0.5;
  double tau_init = 1.0;
  double tau_min = 0.1;
  // Pair weight exp(-beta * d); 0 gives unit weights.
  double beta = 0.0;
  double clip = 1e5;
  double max_norm = 1.0 - 1e-5;
  std::uint64_t seed = 0;
  // Full-batch gradient up to this many nodes, else shuffled pair batches.
  std::size_t full_batch_limit = 512;
  std::size_t batch_pairs = 4096;
  // Random initialization is uniform in [-init_radius, init_radius]^r.
  double init_radius = 1e-3;
};

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

// Observed pairs i < j in row-major order.
template <Real R>
PairList observed_pair_list(const DistanceMatrix<R>& d);

// sum over observed pairs of weight(d_ij) (tau d_H(x_i, x_j) - d_ij)^2.
template <Real R>
R sgd_loss(const Matrix<R>& x, const R& tau, const DistanceMatrix<R>& d, double beta = 0.0);

template <Real R>
struct SgdGradient {
  Matrix<R> x;
  R tau;
};

// Euclidean gradient of the loss restricted to `pairs`. Coincident points
// contribute no gradient. Throws NumericalError naming the pair on a
// non-finite value.
template <Real R>
SgdGradient<R> sgd_gradient(const Matrix<R>& x, const R& tau, const DistanceMatrix<R>& d, const PairList& pairs,
                            double beta = 0.0);

template <Real R>
struct SgdState {
  Matrix<R> x;
  R tau;
};

// One update on the batch mean: point gradients scaled by (1 - |x|^2)^2 / 4,
// clipped componentwise, applied, and the points pulled back to norm <=
// max_norm; tau takes a plain gradient step and is floored at tau_min.
template <Real R>
void sgd_step(SgdState<R>& s, const DistanceMatrix<R>& d, const PairList& batch, const SgdConfig& cfg);

template <Real R>
struct SgdResult {
  Embedding<R> embedding;  // scale = 1 / tau
  R tau;
  std::vector<double> loss_trace;  // full observed loss before each epoch and after the last
  double min_tau = 0;              // smallest tau over all iterates
};

// Distances are divided by their RMS over observed pairs before optimizing so
// that the learning rate is scale free; the reported tau and loss are in the
// original units. `warm` supplies starting points (matched by label) and tau.
template <Real R>
SgdResult<R> sgd_embed(const DistanceMatrix<R>& d, const SgdConfig& cfg, const Embedding<R>* warm = nullptr);

}  // namespace hypembed
