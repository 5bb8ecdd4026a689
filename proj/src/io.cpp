#include "hypembed/io.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "hypembed/errors.hpp"

namespace hypembed {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> fields;
};

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

// Non-blank lines with a trailing '\r' removed. Lines starting with '#' go to
// `comments` when given, otherwise they are dropped.
std::vector<Line> table_lines(std::string_view text, std::vector<std::string>* comments = nullptr) {
  std::vector<Line> out;
  std::size_t number = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++number;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (line.front() == '#') {
      if (comments) comments->emplace_back(line.substr(1));
      continue;
    }
    out.push_back({number, split_tabs(line)});
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

template <Real R>
std::string format_distance(const R& v) {
  const double d = to_double(v);
  if (d == std::floor(d) && std::abs(d) < 0x1p53 && R(d) == v) {
    std::ostringstream s;
    s << static_cast<long long>(d);
    return s.str();
  }
  if constexpr (std::is_same_v<R, double>) {
    return format_real(v, 53);
  } else {
    return format_real(v, v.precision());
  }
}

}  // namespace

template <Real R>
std::string write_embedding_tsv(const Embedding<R>& e) {
  std::ostringstream out;
  out << "# method=" << (e.method.empty() ? "unknown" : e.method) << " dim=" << e.dim()
      << " scale=" << format_real(e.scale) << " precision=" << e.precision << '\n';
  for (std::size_t i = 0; i < e.size(); ++i) {
    out << e.labels[i];
    for (std::size_t j = 0; j < e.dim(); ++j) out << '\t' << format_real(e.points(i, j), e.precision);
    out << '\n';
  }
  return out.str();
}

template <Real R>
Embedding<R> read_embedding_tsv(std::string_view text) {
  std::vector<std::string> comments;
  const auto lines = table_lines(text, &comments);
  Embedding<R> e;
  e.method = "unknown";
  e.precision = RealTraits<R>::bits();
  int declared_dim = -1;
  for (const auto& c : comments) {
    std::istringstream s(c);
    std::string tok;
    while (s >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
      try {
        if (key == "method") e.method = value;
        else if (key == "scale") e.scale = parse_real<double>(value);
        else if (key == "precision") e.precision = std::stoi(value);
        else if (key == "dim") declared_dim = std::stoi(value);
      } catch (const std::logic_error&) {
        throw InputError("embedding header: bad value for " + key + ": '" + value + "'");
      }
    }
  }
  if (lines.empty()) throw InputError("embedding file has no points");
  const std::size_t r = lines.front().fields.size() - 1;
  if (r == 0) fail(lines.front().number, "expected a label and at least one coordinate");
  if (declared_dim >= 0 && static_cast<std::size_t>(declared_dim) != r) {
    throw InputError("embedding header declares dim=" + std::to_string(declared_dim) + " but rows have " +
                     std::to_string(r) + " coordinates");
  }
  e.points = Matrix<R>(lines.size(), r);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& [number, f] = lines[i];
    if (f.size() != r + 1) {
      fail(number, "expected " + std::to_string(r + 1) + " fields, found " + std::to_string(f.size()));
    }
    if (f[0].empty()) fail(number, "empty label");
    if (!seen.insert(f[0]).second) fail(number, "duplicate label '" + f[0] + "'");
    e.labels.push_back(f[0]);
    try {
      for (std::size_t j = 0; j < r; ++j) e.points(i, j) = parse_real<R>(f[j + 1]);
    } catch (const InputError& err) {
      fail(number, err.what());
    }
    if (!(norm2<R>(e.points.row(i)) < 1.0)) fail(number, "point '" + f[0] + "' is not inside the unit ball");
  }
  return e;
}

template <Real R>
std::string write_distance_tsv(const DistanceMatrix<R>& d) {
  std::ostringstream out;
  const std::size_t n = d.size();
  for (std::size_t j = 0; j < n; ++j) out << (j ? "\t" : "") << d.labels[j];
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << d.labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      out << '\t';
      if (d.observed(i, j)) out << format_distance(d.d(i, j));
      else out << "NA";
    }
    out << '\n';
  }
  return out.str();
}

template <Real R>
DistanceMatrix<R> read_distance_tsv(std::string_view text) {
  const auto lines = table_lines(text);
  if (lines.empty()) throw InputError("distance file is empty");
  DistanceMatrix<R> d;
  d.labels = lines.front().fields;
  // Tolerate a leading empty corner cell.
  if (!d.labels.empty() && d.labels.front().empty()) d.labels.erase(d.labels.begin());
  const std::size_t n = d.labels.size();
  std::unordered_set<std::string> seen;
  for (const auto& l : d.labels) {
    if (l.empty()) fail(lines.front().number, "empty label in header");
    if (!seen.insert(l).second) fail(lines.front().number, "duplicate label '" + l + "'");
  }
  if (lines.size() != n + 1) {
    throw InputError("distance file has " + std::to_string(n) + " labels but " + std::to_string(lines.size() - 1) +
                     " rows");
  }
  d.d = Matrix<R>(n, n);
  std::vector<std::uint8_t> mask(n * n, 1);
  bool any_missing = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [number, f] = lines[i + 1];
    std::size_t offset = 0;
    if (f.size() == n + 1) {
      if (f[0] != d.labels[i]) fail(number, "row label '" + f[0] + "' does not match header '" + d.labels[i] + "'");
      offset = 1;
    } else if (f.size() != n) {
      fail(number, "expected " + std::to_string(n) + " values, found " + std::to_string(f.size()));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& cell = f[j + offset];
      if (cell == "NA") {
        if (i == j) fail(number, "diagonal entry cannot be NA");
        mask[i * n + j] = 0;
        any_missing = true;
        continue;
      }
      try {
        d.d(i, j) = parse_real<R>(cell);
      } catch (const InputError& err) {
        fail(number, err.what());
      }
      if (!(d.d(i, j) >= 0.0)) fail(number, "negative or invalid distance '" + cell + "'");
      if (i == j && !(d.d(i, j) == 0.0)) fail(number, "nonzero diagonal entry for '" + d.labels[i] + "'");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mask[i * n + j] != mask[j * n + i] || (mask[i * n + j] && !(d.d(i, j) == d.d(j, i)))) {
        throw InputError("distance matrix is not symmetric at ('" + d.labels[i] + "', '" + d.labels[j] + "')");
      }
    }
  if (any_missing) d.mask = std::move(mask);
  return d;
}

bool looks_like_distance_tsv(std::string_view text) {
  try {
    read_distance_tsv<double>(text);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

#define HYPEMBED_INSTANTIATE(R)                                                 \
  template std::string write_embedding_tsv<R>(const Embedding<R>&);             \
  template Embedding<R> read_embedding_tsv<R>(std::string_view);                \
  template std::string write_distance_tsv<R>(const DistanceMatrix<R>&);         \
  template DistanceMatrix<R> read_distance_tsv<R>(std::string_view);
HYPEMBED_INSTANTIATE(double)
HYPEMBED_INSTANTIATE(BigFloat)
#undef HYPEMBED_INSTANTIATE

}  // namespace hypembed
