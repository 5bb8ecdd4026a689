#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hypembed/geometry.hpp"
#include "hypembed/matrix.hpp"

namespace hypembed {

// Node -> Poincare point map. `scale` is the factor s with
// d_H(f(u), f(v)) ~ s * d(u, v): tau for the combinatorial construction,
// 1/tau for the learned-scale optimizer and 1 for h-MDS.
template <Real R>
struct Embedding {
  std::vector<std::string> labels;
  Matrix<R> points;  // n x r
  std::string method;
  double scale = 1.0;
  int precision = 53;

  std::size_t size() const noexcept { return points.rows(); }
  std::size_t dim() const noexcept { return points.cols(); }
};

// acosh(1 + q) in hardware double, valid over the whole double range.
inline double acosh1p_double(double q) {
  if (q > 1e8) return std::log(2.0 * (1.0 + q)) - 1.0 / (4.0 * (1.0 + q) * (1.0 + q));
  return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

// d_H rounded to double. The cancellation-prone part (the gaps 1 - |x|^2) is
// evaluated in R; the final acosh runs in double unless q overflows.
template <Real R>
double distance_double(std::span<const R> x, std::span<const R> y) {
  bool x0 = true, y0 = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] == 0.0)) x0 = false;
    if (!(y[i] == 0.0)) y0 = false;
  }
  if (x0 || y0) return to_double(dist_poincare<R>(x, y));
  const R q = poincare_q<R>(x, y);
  const double qd = to_double(q);
  if (std::isfinite(qd) && qd < std::numeric_limits<double>::max() / 4) return acosh1p_double(qd);
  return to_double(acosh1p(q));
}

}  // namespace hypembed
