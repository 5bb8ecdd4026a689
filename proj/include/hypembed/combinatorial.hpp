#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hypembed/embedding.hpp"
#include "hypembed/graph.hpp"

namespace hypembed {

struct CombinatorialConfig {
  double epsilon = 0.1;
  // Edge scale; <= 0 derives it from compute_tau(max degree, epsilon).
  double tau = 0.0;
  int dim = 2;
  // With dim == 2, use hypercube-code placement instead of equal angles.
  bool force_code = false;
};

// ((1 + eps) / eps) * 2 ln(deg_max / (pi/2)), floored at 0.1. eps may be
// +infinity (pure Delaunay scale).
double compute_tau(std::size_t deg_max, double epsilon);

// tau actually used for t under cfg.
double resolve_tau(const WeightedTree& t, const CombinatorialConfig& cfg);

// Places children around `parent` at hyperbolic distances lengths[i], evenly
// spaced on a circle and maximally separated from the grandparent.
template <Real R>
std::vector<std::vector<R>> place_children_2d(std::span<const R> parent, std::optional<std::span<const R>> grandparent,
                                              const std::vector<R>& lengths);

template <Real R>
std::vector<std::vector<R>> place_children_2d(std::span<const R> parent, std::optional<std::span<const R>> grandparent,
                                              std::size_t count, const R& tau) {
  return place_children_2d<R>(parent, grandparent, std::vector<R>(count, tau));
}

// Unit vectors at hypercube vertices indexed by Hadamard codewords, pairwise
// at Euclidean distance >= sqrt(2). Codewords are repeated when the code
// length 2^k divides into r; when 2^k exceeds r the code of length
// 2^floor(log2 r) is used together with its complements. Throws InputError
// when count exceeds 2^floor(log2 r + 1) and 2^ceil(log2 count) > r.
template <Real R>
Matrix<R> hypercube_code_points(int r, std::size_t count);

// Largest count hypercube_code_points accepts at dimension r.
std::size_t hypercube_capacity(int r);

// Places children at hyperbolic distances lengths[i] along hypercube code
// directions, with codeword 0 rotated onto the grandparent direction.
template <Real R>
std::vector<std::vector<R>> place_children_rd(std::span<const R> parent, std::optional<std::span<const R>> grandparent,
                                              const std::vector<R>& lengths, int r);

// Sarkar's construction (dim 2) or its hypercube-code generalization. The root
// sits at the origin; each child lies at distance tau * w(edge) from its
// parent. Throws PrecisionError when a point rounds onto the boundary.
template <Real R>
Embedding<R> embed_tree(const WeightedTree& t, const CombinatorialConfig& cfg);

// ceil(l * tau / ln 2) where l is the weighted longest path.
int required_precision(const WeightedTree& t, const CombinatorialConfig& cfg);

}  // namespace hypembed
