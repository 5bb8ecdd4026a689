#pragma once

#include <cstddef>
#include <vector>

#include "hypembed/matrix.hpp"

namespace hypembed {

template <Real R>
struct EigenDecomposition {
  std::vector<R> values;  // descending (algebraic)
  Matrix<R> vectors;      // n x k, orthonormal columns matching `values`
  int sweeps = 0;
};

struct JacobiOptions {
  // Off-diagonal Frobenius norm target relative to ||m||_F; <= 0 selects
  // RealTraits<R>::tol().
  double tol = 0.0;
  int max_sweeps = 100;
};

// Top-k eigenpairs of a symmetric matrix by cyclic Jacobi rotations.
// Throws NumericalError (with the achieved off-diagonal residual) if the
// sweeps do not converge.
template <Real R>
EigenDecomposition<R> sym_eig(const SymMatrix<R>& m, std::size_t k, JacobiOptions opts = {});

template <Real R>
struct Eigenpair {
  R value;
  std::vector<R> vector;
  int iterations = 0;
};

// Dominant (largest magnitude) eigenpair by power iteration. Stops at relative
// residual ||m v - l v|| <= RealTraits<R>::power_tol() * |l|. Throws
// NumericalError when no dominant eigenvalue emerges within max_iterations.
template <Real R>
Eigenpair<R> top_eigenpair(const SymMatrix<R>& m, int max_iterations = 200000);

// max_i ||m v_i - l_i v_i||, the quantity bounded by the sym_eig contract.
template <Real R>
R max_eigen_residual(const SymMatrix<R>& m, const EigenDecomposition<R>& e);

}  // namespace hypembed
