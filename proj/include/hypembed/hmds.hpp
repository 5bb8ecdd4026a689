#pragma once

#include <string>
#include <vector>

#include "hypembed/embedding.hpp"
#include "hypembed/graph.hpp"

namespace hypembed {

enum class Recenter { none, karcher, pseudo_euclidean };

// Parses "none", "karcher" or "pseudo_euclidean".
Recenter parse_recenter(const std::string& name);
const char* recenter_name(Recenter r);

struct HmdsOptions {
  Recenter recenter = Recenter::karcher;
  // Eigenvalues below clamp_tol * lambda_1 are treated as 0; <= 0 selects
  // 1e-10 at double and RealTraits<R>::tol() otherwise.
  double clamp_tol = 0.0;
};

template <Real R>
struct HmdsResult {
  Embedding<R> embedding;
  std::vector<R> eigenvalues;  // all eigenvalues of -Y, descending
  Matrix<R> x;                 // Gans coordinates before recentering
  std::vector<R> u;            // u_i = sqrt(1 + |x_i|^2)
  R residual;                  // max |d_H(f(i), f(j)) - d_ij|
  R centered_norm;             // |X^T u| / (|X| |u|) before recentering
  std::size_t kept = 0;        // eigenvalues kept after clamping
  std::vector<std::string> warnings;
};

// Entrywise cosh. Throws InputError if any entry is unobserved.
template <Real R>
SymMatrix<R> cosh_matrix(const DistanceMatrix<R>& d);

// Exact hyperbolic MDS at rank r (1 <= r <= n - 1).
template <Real R>
HmdsResult<R> run_hmds(const DistanceMatrix<R>& d, int r, HmdsOptions opts = {});

// (2 n^2 / lambda_min) sinh^2(h_inf) delta_inf^2, with h_inf the largest
// entry of h. Throws InputError when lambda_min <= 0.
template <Real R>
R perturbation_bound(const DistanceMatrix<R>& h, const R& delta_inf, const R& lambda_min);

// min over orthogonal P of |X - Y P|_F^2 (rows are points).
template <Real R>
R procrustes_gap(const Matrix<R>& x, const Matrix<R>& y);

}  // namespace hypembed
