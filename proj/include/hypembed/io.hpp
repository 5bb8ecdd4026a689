#pragma once

#include <string>
#include <string_view>

#include "hypembed/embedding.hpp"
#include "hypembed/graph.hpp"

namespace hypembed {

// Embedding TSV: an optional "# method=M dim=R scale=S precision=P" line, then
// "label<TAB>c1<TAB>...<TAB>cr" with decimal_digits_for_bits(precision) digits.
template <Real R>
std::string write_embedding_tsv(const Embedding<R>& e);

// Coordinates are parsed at the working precision. Without a header, method is
// "unknown", scale 1 and precision the working precision (53 for double).
// Throws InputError on ragged rows, duplicate labels or points outside the ball.
template <Real R>
Embedding<R> read_embedding_tsv(std::string_view text);

// Distance TSV: a header row of labels, then one row per label. Rows may be
// prefixed by their label; "NA" marks an unobserved entry. Integral values are
// written without an exponent.
template <Real R>
std::string write_distance_tsv(const DistanceMatrix<R>& d);

// Throws InputError on a non-square, asymmetric or negative matrix, a nonzero
// diagonal or a row label that disagrees with the header.
template <Real R>
DistanceMatrix<R> read_distance_tsv(std::string_view text);

// True if text parses as a distance TSV. Used to tell distance files from
// edge lists.
bool looks_like_distance_tsv(std::string_view text);

}  // namespace hypembed
