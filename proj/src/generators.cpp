#include "spmm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spmm/error.hpp"

namespace spmm {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("Rng::below: zero bound");
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

namespace {

// Floyd's sampling: `count` distinct values from [0, cols), appended sorted.
void sample_columns(Rng& rng, Index cols, Index count, std::vector<char>& marked,
                    std::vector<Index>& out) {
  const std::size_t first = out.size();
  for (Index j = cols - count; j < cols; ++j) {
    Index t = static_cast<Index>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (marked[static_cast<std::size_t>(t)]) t = j;
    marked[static_cast<std::size_t>(t)] = 1;
    out.push_back(t);
  }
  for (std::size_t i = first; i < out.size(); ++i) marked[static_cast<std::size_t>(out[i])] = 0;
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

}  // namespace

template <typename T>
CsrMatrix<T> gen_aspect_matrix(Index total_nnz, Index num_rows) {
  if (num_rows <= 0 || total_nnz < 0)
    throw ArgumentError("gen_aspect_matrix: need num_rows > 0 and total_nnz >= 0");
  if (total_nnz % num_rows != 0)
    throw ArgumentError("gen_aspect_matrix: " + std::to_string(num_rows) +
                        " rows do not divide " + std::to_string(total_nnz) + " nonzeros");
  const Index width = total_nnz / num_rows;
  std::vector<Index> offsets(static_cast<std::size_t>(num_rows) + 1);
  std::vector<Index> cols(static_cast<std::size_t>(total_nnz));
  std::vector<T> vals(static_cast<std::size_t>(total_nnz));
  for (Index r = 0; r < num_rows; ++r) {
    offsets[static_cast<std::size_t>(r) + 1] = (r + 1) * width;
    const T v = static_cast<T>(1.0 + static_cast<double>(r % 8) * 0.125);
    for (Index c = 0; c < width; ++c) {
      cols[static_cast<std::size_t>(r * width + c)] = c;
      vals[static_cast<std::size_t>(r * width + c)] = v;
    }
  }
  return CsrMatrix<T>(num_rows, width, std::move(offsets), std::move(cols), std::move(vals));
}

template <typename T>
CsrMatrix<T> gen_uniform_random(Index rows, Index cols, double fill_fraction, RngSeed seed) {
  if (rows < 0 || cols < 0) throw ArgumentError("gen_uniform_random: negative dimension");
  if (!(fill_fraction >= 0.0 && fill_fraction <= 1.0))
    throw ArgumentError("gen_uniform_random: fill fraction outside [0, 1]");
  const Index per_row = static_cast<Index>(std::llround(fill_fraction * static_cast<double>(cols)));
  Rng rng(seed);
  std::vector<char> marked(static_cast<std::size_t>(cols), 0);
  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> col_ind;
  std::vector<T> vals;
  col_ind.reserve(static_cast<std::size_t>(rows * per_row));
  vals.reserve(static_cast<std::size_t>(rows * per_row));
  for (Index r = 0; r < rows; ++r) {
    sample_columns(rng, cols, per_row, marked, col_ind);
    for (Index i = 0; i < per_row; ++i) vals.push_back(static_cast<T>(rng.unit_open_closed()));
    offsets[static_cast<std::size_t>(r) + 1] = static_cast<Index>(col_ind.size());
  }
  return CsrMatrix<T>(rows, cols, std::move(offsets), std::move(col_ind), std::move(vals));
}

template <typename T>
CsrMatrix<T> gen_row_lengths(std::span<const Index> row_lengths, Index cols, RngSeed seed) {
  if (cols < 0) throw ArgumentError("gen_row_lengths: negative column count");
  Rng rng(seed);
  std::vector<char> marked(static_cast<std::size_t>(cols), 0);
  std::vector<Index> offsets(row_lengths.size() + 1, 0);
  std::vector<Index> col_ind;
  std::vector<T> vals;
  for (std::size_t r = 0; r < row_lengths.size(); ++r) {
    const Index len = row_lengths[r];
    if (len < 0 || len > cols)
      throw ArgumentError("gen_row_lengths: row " + std::to_string(r) + " length " +
                          std::to_string(len) + " exceeds " + std::to_string(cols) + " columns");
    sample_columns(rng, cols, len, marked, col_ind);
    for (Index i = 0; i < len; ++i) vals.push_back(static_cast<T>(2.0 * rng.unit() - 1.0));
    offsets[r + 1] = static_cast<Index>(col_ind.size());
  }
  return CsrMatrix<T>(static_cast<Index>(row_lengths.size()), cols, std::move(offsets),
                      std::move(col_ind), std::move(vals));
}

template <typename T>
DenseMatrix<T> random_dense(Index rows, Index cols, Layout layout, RngSeed seed) {
  Rng rng(seed);
  DenseMatrix<T> out(rows, cols, layout);
  for (auto& x : out.data()) x = static_cast<T>(2.0 * rng.unit() - 1.0);
  return out;
}

#define SPMM_INSTANTIATE(T)                                                                \
  template CsrMatrix<T> gen_aspect_matrix<T>(Index, Index);                               \
  template CsrMatrix<T> gen_uniform_random<T>(Index, Index, double, RngSeed);             \
  template CsrMatrix<T> gen_row_lengths<T>(std::span<const Index>, Index, RngSeed);       \
  template DenseMatrix<T> random_dense<T>(Index, Index, Layout, RngSeed);

SPMM_INSTANTIATE(float)
SPMM_INSTANTIATE(double)

#undef SPMM_INSTANTIATE

}  // namespace spmm
