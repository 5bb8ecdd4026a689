#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hypembed/geometry.hpp"

namespace hypembed {

template <Real R>
struct PgaProblem {
  std::vector<R> mean;  // Karcher mean of the input, moved to the origin
  Matrix<R> x;          // centered points
  Matrix<R> w;          // w_i = sqrt(8) x_i / (1 - |x_i|^2)
};

template <Real R>
struct PgaFit {
  std::vector<R> direction;  // unit; first nonzero coordinate positive
  R loss;
  R gradient_norm;
  int restarts = 0;
  int best_restart = 0;      // 0 is the PCA warm start
  bool converged = false;
  bool convexity_certified = false;
  std::vector<R> restart_losses;
  std::vector<bool> restart_converged;
};

template <Real R>
struct GeodesicProjection {
  R coordinate;         // signed hyperbolic arc length from the origin
  std::vector<R> foot;  // nearest point of the geodesic
  R residual;           // d_H(geodesic, x) = d_H(x, reflection of x) / 2
};

struct ConvexityCertificate {
  std::vector<bool> per_point;
  bool certified = false;
};

// Moves the Karcher mean of pts to the origin and applies the w-transform.
// Throws InputError for fewer than 2 points.
template <Real R>
PgaProblem<R> pga_prepare(const Matrix<R>& pts);

// Builds the problem from points that are already centered.
template <Real R>
PgaProblem<R> pga_problem_centered(const Matrix<R>& x);

// (1/4) sum_i acosh^2(1 + |(I - u u^T) w_i|^2); u must be a unit vector.
template <Real R>
R pga_loss(std::span<const R> u, const PgaProblem<R>& prob);

// The same loss from the centered points directly:
// (1/4) sum_i acosh^2(1 + 8 d_E(line, x_i)^2 / (1 - |x_i|^2)^2).
template <Real R>
R pga_loss_unsimplified(std::span<const R> u, const PgaProblem<R>& prob);

// Gradient of pga_loss projected onto the tangent space of the sphere at u.
template <Real R>
std::vector<R> pga_grad(std::span<const R> u, const PgaProblem<R>& prob);

struct PgaOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  double grad_tol = 1e-10;
  int max_iterations = 20000;
};

// Projected gradient descent with backtracking from the top PCA direction of
// the w_i and from `restarts` spread-out directions; returns the best.
template <Real R>
PgaFit<R> fit_geodesic(const PgaProblem<R>& prob, PgaOptions opts = {});

// Unit starting directions used by fit_geodesic (excluding the PCA start).
std::vector<std::vector<double>> pga_start_directions(int r, int restarts, std::uint64_t seed);

// Per point: acosh^2(1 + |(I - u u^T) w_i|^2) < min(1, |w_i|^2 / 3).
template <Real R>
ConvexityCertificate convexity_certificate(std::span<const R> u, const PgaProblem<R>& prob);

template <Real R>
std::vector<GeodesicProjection<R>> project_to_geodesic(const PgaProblem<R>& prob, std::span<const R> u);

// Flips u so that its first coordinate with |u_i| > 1e-12 is positive.
template <Real R>
void canonicalize_sign(std::vector<R>& u);

}  // namespace hypembed
