#include "spmm/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "spmm/error.hpp"

namespace spmm {

const char* to_string(Layout layout) noexcept {
  return layout == Layout::RowMajor ? "RowMajor" : "ColMajor";
}

template <typename T>
DenseMatrix<T>::DenseMatrix(Index rows, Index cols, Layout layout)
    : rows_(rows), cols_(cols), layout_(layout) {
  if (rows < 0 || cols < 0) throw ArgumentError("DenseMatrix: negative dimension");
  data_.assign(static_cast<std::size_t>(rows * cols), T{0});
}

template <typename T>
DenseMatrix<T>::DenseMatrix(Index rows, Index cols, Layout layout, std::vector<T> data)
    : rows_(rows), cols_(cols), layout_(layout), data_(std::move(data)) {
  if (rows < 0 || cols < 0) throw ArgumentError("DenseMatrix: negative dimension");
  if (data_.size() != static_cast<std::size_t>(rows * cols)) {
    throw ArgumentError("DenseMatrix: data length " + std::to_string(data_.size()) +
                        " != " + std::to_string(rows) + " x " + std::to_string(cols));
  }
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::with_layout(Layout layout) const {
  DenseMatrix out(rows_, cols_, layout);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
  return out;
}

template <typename T>
CsrMatrix<T>::CsrMatrix(Index num_rows, Index num_cols, std::vector<Index> row_offsets,
                        std::vector<Index> col_indices, std::vector<T> values)
    : rows_(num_rows),
      cols_(num_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0) throw ArgumentError("CsrMatrix: negative dimension");
  if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1)
    throw ArgumentError("CsrMatrix: row_offsets must have num_rows + 1 entries");
  if (col_indices_.size() != values_.size())
    throw ArgumentError("CsrMatrix: col_indices and values differ in length");
  if (row_offsets_.front() != 0) throw ArgumentError("CsrMatrix: row_offsets[0] != 0");
  if (row_offsets_.back() != nnz()) throw ArgumentError("CsrMatrix: row_offsets[m] != nnz");
  for (Index r = 0; r < rows_; ++r) {
    const Index b = row_begin(r);
    const Index e = row_end(r);
    if (e < b) throw ArgumentError("CsrMatrix: row_offsets decreases at row " + std::to_string(r));
    for (Index p = b; p < e; ++p) {
      const Index c = col_indices_[static_cast<std::size_t>(p)];
      if (c < 0 || c >= cols_)
        throw ArgumentError("CsrMatrix: column " + std::to_string(c) + " out of range in row " +
                            std::to_string(r));
      if (p > b && c <= col_indices_[static_cast<std::size_t>(p - 1)])
        throw ArgumentError("CsrMatrix: columns not strictly increasing in row " +
                            std::to_string(r));
    }
  }
}

template <typename T>
CsrMatrix<T> build_csr(Index m, Index k, std::span<const CooTriple<T>> triples) {
  if (m < 0 || k < 0) throw ArgumentError("build_csr: negative dimension");
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    if (t.row < 0 || t.row >= m || t.col < 0 || t.col >= k) {
      std::ostringstream msg;
      msg << "build_csr: triple #" << i << " (" << t.row << ", " << t.col << ", " << t.value
          << ") outside " << m << " x " << k;
      throw ArgumentError(msg.str());
    }
  }

  // Stable sort keeps duplicates in input order so their sum is reproducible.
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = triples[a];
    const auto& y = triples[b];
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  std::vector<Index> offsets(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> cols;
  std::vector<T> vals;
  cols.reserve(triples.size());
  vals.reserve(triples.size());
  Index last_row = -1;
  Index last_col = -1;
  for (std::size_t idx : order) {
    const auto& t = triples[idx];
    if (t.row == last_row && t.col == last_col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[static_cast<std::size_t>(t.row) + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return CsrMatrix<T>(m, k, std::move(offsets), std::move(cols), std::move(vals));
}

template <typename T>
std::vector<CooTriple<T>> to_triples(const CsrMatrix<T>& a) {
  std::vector<CooTriple<T>> out;
  out.reserve(static_cast<std::size_t>(a.nnz()));
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index r = 0; r < a.num_rows(); ++r)
    for (Index p = a.row_begin(r); p < a.row_end(r); ++p)
      out.push_back({r, cols[static_cast<std::size_t>(p)], vals[static_cast<std::size_t>(p)]});
  return out;
}

template <typename T>
DenseMatrix<T> densify(const CsrMatrix<T>& a, Layout layout) {
  DenseMatrix<T> out(a.num_rows(), a.num_cols(), layout);
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index r = 0; r < a.num_rows(); ++r)
    for (Index p = a.row_begin(r); p < a.row_end(r); ++p)
      out(r, cols[static_cast<std::size_t>(p)]) = vals[static_cast<std::size_t>(p)];
  return out;
}

template <typename T>
CsrMatrix<T> csr_from_dense_all(const DenseMatrix<T>& dense) {
  const Index m = dense.num_rows();
  const Index k = dense.num_cols();
  std::vector<Index> offsets(static_cast<std::size_t>(m) + 1);
  std::vector<Index> cols(static_cast<std::size_t>(m * k));
  std::vector<T> vals(static_cast<std::size_t>(m * k));
  for (Index r = 0; r < m; ++r) {
    offsets[static_cast<std::size_t>(r) + 1] = (r + 1) * k;
    for (Index c = 0; c < k; ++c) {
      cols[static_cast<std::size_t>(r * k + c)] = c;
      vals[static_cast<std::size_t>(r * k + c)] = dense(r, c);
    }
  }
  return CsrMatrix<T>(m, k, std::move(offsets), std::move(cols), std::move(vals));
}

template <typename T>
CsrMatrix<T> identity(Index n) {
  if (n < 0) throw ArgumentError("identity: negative size");
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
  std::vector<Index> cols(static_cast<std::size_t>(n));
  std::iota(offsets.begin(), offsets.end(), Index{0});
  std::iota(cols.begin(), cols.end(), Index{0});
  return CsrMatrix<T>(n, n, std::move(offsets), std::move(cols),
                      std::vector<T>(static_cast<std::size_t>(n), T{1}));
}

template class DenseMatrix<float>;
template class DenseMatrix<double>;
template class CsrMatrix<float>;
template class CsrMatrix<double>;

#define SPMM_INSTANTIATE(T)                                                            \
  template CsrMatrix<T> build_csr<T>(Index, Index, std::span<const CooTriple<T>>);    \
  template std::vector<CooTriple<T>> to_triples<T>(const CsrMatrix<T>&);              \
  template DenseMatrix<T> densify<T>(const CsrMatrix<T>&, Layout);                    \
  template CsrMatrix<T> csr_from_dense_all<T>(const DenseMatrix<T>&);                 \
  template CsrMatrix<T> identity<T>(Index);

SPMM_INSTANTIATE(float)
SPMM_INSTANTIATE(double)

#undef SPMM_INSTANTIATE

}  // namespace spmm
