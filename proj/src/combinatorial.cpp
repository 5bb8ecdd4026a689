#include "hypembed/combinatorial.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace hypembed {

double compute_tau(std::size_t deg_max, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  const double factor = std::isinf(epsilon) ? 1.0 : (1.0 + epsilon) / epsilon;
  const double tau = factor * 2.0 * std::log(static_cast<double>(deg_max) / (std::numbers::pi / 2));
  return std::max(tau, 0.1);
}

double resolve_tau(const WeightedTree& t, const CombinatorialConfig& cfg) {
  if (cfg.tau > 0) return cfg.tau;
  return compute_tau(t.graph.max_degree(), cfg.epsilon);
}

namespace {

// Point at hyperbolic distance `len` from the origin in direction `dir`
// (unit), carried to the neighbourhood of `parent`.
template <Real R>
std::vector<R> place(std::span<const R> parent, const std::vector<R>& dir, const R& len) {
  using std::tanh;
  const R radius = tanh(len / 2.0);
  std::vector<R> y(dir.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = dir[j] * radius;
  auto out = translate_from_origin<R>(parent, y);
  boundary_gap<R>(out);
  return out;
}

template <Real R>
std::optional<std::vector<R>> reflected_direction(std::span<const R> parent,
                                                  std::optional<std::span<const R>> grandparent) {
  using std::sqrt;
  if (!grandparent) return std::nullopt;
  auto z = translate_to_origin<R>(parent, *grandparent);
  const R len = sqrt(norm2<R>(z));
  if (!(len > 0.0)) throw NumericalError("parent and grandparent coincide");
  for (auto& v : z) v /= len;
  return z;
}

}  // namespace

template <Real R>
std::vector<std::vector<R>> place_children_2d(std::span<const R> parent, std::optional<std::span<const R>> grandparent,
                                              const std::vector<R>& lengths) {
  using std::atan2;
  using std::cos;
  using std::sin;
  if (parent.size() != 2) throw InputError("place_children_2d needs points in dimension 2");
  const std::size_t count = lengths.size();
  std::vector<std::vector<R>> out;
  if (count == 0) return out;
  const auto z = reflected_direction<R>(parent, grandparent);
  R theta(0.0);
  double deg = static_cast<double>(count);
  std::size_t first = 0;
  if (z) {
    theta = atan2((*z)[1], (*z)[0]);
    deg += 1.0;
    first = 1;
  }
  const R two_pi = pi_value<R>() * 2.0;
  for (std::size_t i = 0; i < count; ++i) {
    const R angle = theta + two_pi * (static_cast<double>(i + first) / deg);
    out.push_back(place<R>(parent, {cos(angle), sin(angle)}, lengths[i]));
  }
  return out;
}

std::size_t hypercube_capacity(int r) {
  if (r < 1) return 0;
  return std::size_t{2} << std::bit_width(static_cast<unsigned>(r)) >> 1;
}

template <Real R>
Matrix<R> hypercube_code_points(int r, std::size_t count) {
  using std::sqrt;
  if (r < 2) throw InputError("hypercube code placement needs dimension >= 2");
  if (count > hypercube_capacity(r)) {
    throw InputError("cannot place " + std::to_string(count) + " children at dimension " + std::to_string(r) +
                     " (capacity " + std::to_string(hypercube_capacity(r)) +
                     "); use a larger dimension or the 2-d construction");
  }
  Matrix<R> out(count, static_cast<std::size_t>(r));
  if (count == 0) return out;
  const std::size_t need = std::bit_ceil(std::max<std::size_t>(count, 1));
  const bool augmented = need > static_cast<std::size_t>(r);
  const std::size_t len = augmented ? std::bit_floor(static_cast<std::size_t>(r)) : need;
  const std::size_t reps = static_cast<std::size_t>(r) / len;
  const R unit = R(1.0) / sqrt(R(static_cast<double>(reps * len)));
  for (std::size_t a = 0; a < count; ++a) {
    const std::size_t word = a % len;
    const bool flip = a >= len;
    for (std::size_t j = 0; j < len; ++j) {
      // Hadamard codeword bit j of message `word`: parity of word & j.
      const bool bit = (std::popcount(word & j) & 1) != flip;
      for (std::size_t k = 0; k < reps; ++k) out(a, k * len + j) = bit ? -unit : unit;
    }
  }
  return out;
}

template <Real R>
std::vector<std::vector<R>> place_children_rd(std::span<const R> parent, std::optional<std::span<const R>> grandparent,
                                              const std::vector<R>& lengths, int r) {
  const std::size_t count = lengths.size();
  std::vector<std::vector<R>> out;
  if (count == 0) return out;
  const auto z = reflected_direction<R>(parent, grandparent);
  const std::size_t first = z ? 1 : 0;
  const Matrix<R> code = hypercube_code_points<R>(r, count + first);
  // Householder reflection taking codeword 0 onto z.
  std::vector<R> v;
  R vv(0.0);
  if (z) {
    v.resize(static_cast<std::size_t>(r));
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = code(0, j) - (*z)[j];
    vv = norm2<R>(v);
    if (!(vv > RealTraits<R>::epsilon())) v.clear();
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto row = code.row(i + first);
    std::vector<R> dir(row.begin(), row.end());
    if (!v.empty()) {
      const R k = dot<R>(v, dir) * 2.0 / vv;
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] -= v[j] * k;
    }
    out.push_back(place<R>(parent, dir, lengths[i]));
  }
  return out;
}

int required_precision(const WeightedTree& t, const CombinatorialConfig& cfg) {
  const double bits = weighted_longest_path(t) * resolve_tau(t, cfg) / std::numbers::ln2;
  return static_cast<int>(std::ceil(bits));
}

namespace {

// Unit directions of a node's children in its local frame, where the parent
// (if any) lies along -e1.
template <Real R>
std::vector<std::vector<R>> local_directions(std::size_t count, bool has_parent, int r, bool code) {
  using std::cos;
  using std::sin;
  std::vector<std::vector<R>> dirs;
  const std::size_t first = has_parent ? 1 : 0;
  if (!code) {
    const R two_pi = pi_value<R>() * 2.0;
    const R theta = has_parent ? pi_value<R>() : R(0.0);
    const double deg = static_cast<double>(count + first);
    for (std::size_t i = 0; i < count; ++i) {
      const R angle = theta + two_pi * (static_cast<double>(i + first) / deg);
      dirs.push_back({cos(angle), sin(angle)});
    }
    return dirs;
  }
  const Matrix<R> words = hypercube_code_points<R>(r, count + first);
  // Householder reflection taking codeword 0 onto -e1.
  std::vector<R> v;
  R vv(0.0);
  if (has_parent) {
    auto c0 = words.row(0);
    v.assign(c0.begin(), c0.end());
    v[0] += 1.0;
    vv = norm2<R>(v);
    if (!(vv > RealTraits<R>::epsilon())) v.clear();
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto row = words.row(i + first);
    std::vector<R> dir(row.begin(), row.end());
    if (!v.empty()) {
      const R k = dot<R>(v, dir) * 2.0 / vv;
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] -= v[j] * k;
    }
    dirs.push_back(std::move(dir));
  }
  return dirs;
}

// G = diag(1, Q) * boost(len) on hyperboloid coordinates (x0, x1..xr), where Q
// is an orthogonal map with Q e1 = u: a rotation in 2-d, else a Householder
// reflection.
template <Real R>
Matrix<R> step_matrix(const std::vector<R>& u, const R& len) {
  using std::cosh;
  using std::sinh;
  const std::size_t r = u.size();
  Matrix<R> q(r, r);
  if (r == 2) {
    q(0, 0) = u[0];
    q(1, 0) = u[1];
    q(0, 1) = -u[1];
    q(1, 1) = u[0];
  } else {
    std::vector<R> v(u.begin(), u.end());
    for (auto& x : v) x = -x;
    v[0] += 1.0;
    const R vv = norm2<R>(v);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        q(i, j) = i == j ? R(1.0) : R(0.0);
        if (vv > RealTraits<R>::epsilon()) q(i, j) -= v[i] * v[j] * 2.0 / vv;
      }
  }
  const R ch = cosh(len), sh = sinh(len);
  Matrix<R> g(r + 1, r + 1);
  g(0, 0) = ch;
  g(0, 1) = sh;
  for (std::size_t s = 0; s < r; ++s) {
    g(s + 1, 0) = q(s, 0) * sh;
    g(s + 1, 1) = q(s, 0) * ch;
    for (std::size_t k = 1; k < r; ++k) g(s + 1, k + 1) = q(s, k);
  }
  return g;
}

template <Real R>
Matrix<R> multiply(const Matrix<R>& a, const Matrix<R>& b) {
  Matrix<R> out(a.rows(), b.cols());
  R t;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) {
        t = a(i, k);
        t *= b(k, j);
        out(i, j) += t;
      }
  return out;
}

// Poincare point of the frame origin: xbar / (1 + x0) from column 0. Overflow
// in double shows up as NaN and fails the boundary check.
template <Real R>
void frame_point(const Matrix<R>& f, std::span<R> out) {
  const R denom = f(0, 0) + 1.0;
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = f(s + 1, 0) / denom;
  boundary_gap<R>(std::span<const R>(out.data(), out.size()));
}

}  // namespace

// Each node carries a Lorentz frame: an isometry taking the origin to the node
// and -e1 towards its parent. Points are read off the frame's first column, so
// the gap 1 - |x|^2 = 2 / (1 + x0) never comes from a cancellation and about
// d_H(0, x) / ln 2 bits suffice.
template <Real R>
Embedding<R> embed_tree(const WeightedTree& t, const CombinatorialConfig& cfg) {
  if (cfg.dim < 2) throw InputError("embedding dimension must be at least 2");
  const std::size_t n = t.parent.size();
  const std::size_t r = static_cast<std::size_t>(cfg.dim);
  const double tau = resolve_tau(t, cfg);
  const bool code = cfg.dim > 2 || cfg.force_code;

  Embedding<R> e;
  e.labels = t.graph.labels();
  e.points = Matrix<R>(n, r);
  e.method = "combinatorial";
  e.scale = tau;
  e.precision = RealTraits<R>::bits();
  if (n == 0) return e;
  std::vector<Matrix<R>> frames(n);
  frames[t.root] = Matrix<R>(r + 1, r + 1);
  for (std::size_t i = 0; i <= r; ++i) frames[t.root](i, i) = 1.0;
  try {
    for (std::size_t a : t.order) {
      const auto& ch = t.children[a];
      if (ch.empty()) continue;
      const auto dirs = local_directions<R>(ch.size(), t.parent[a] != kNoNode, cfg.dim, code);
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const std::size_t c = ch[i];
        const R len = R(tau) * t.parent_weight[c];
        Matrix<R> f = multiply(frames[a], step_matrix<R>(dirs[i], len));
        frame_point<R>(f, e.points.row(c));
        if (!t.children[c].empty()) frames[c] = std::move(f);
      }
      frames[a] = Matrix<R>();
    }
  } catch (const PrecisionError&) {
    throw;
  } catch (const NumericalError& err) {
    const int need = required_precision(t, cfg);
    throw PrecisionError("precision underflow at " + std::to_string(RealTraits<R>::bits()) +
                             " bits: the embedding needs about " + std::to_string(need) +
                             " bits (" + err.what() + ")",
                         need);
  }
  return e;
}

#define HYPEMBED_INSTANTIATE(R)                                                                              \
  template std::vector<std::vector<R>> place_children_2d<R>(std::span<const R>, std::optional<std::span<const R>>, \
                                                            const std::vector<R>&);                          \
  template Matrix<R> hypercube_code_points<R>(int, std::size_t);                                            \
  template std::vector<std::vector<R>> place_children_rd<R>(std::span<const R>, std::optional<std::span<const R>>, \
                                                            const std::vector<R>&, int);                     \
  template Embedding<R> embed_tree<R>(const WeightedTree&, const CombinatorialConfig&);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
