#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spmm {

using Index = std::int64_t;

enum class Layout : std::uint8_t { RowMajor, ColMajor };

const char* to_string(Layout layout) noexcept;

template <typename T>
struct CooTriple {
  Index row = 0;
  Index col = 0;
  T value{};

  friend bool operator==(const CooTriple&, const CooTriple&) = default;
};

/// Dense matrix with an explicit storage order. Element (i, j) lives at
/// i * cols + j (RowMajor) or j * rows + i (ColMajor).
template <typename T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, Layout layout = Layout::RowMajor);
  DenseMatrix(Index rows, Index cols, Layout layout, std::vector<T> data);

  Index num_rows() const noexcept { return rows_; }
  Index num_cols() const noexcept { return cols_; }
  Layout layout() const noexcept { return layout_; }

  std::size_t offset(Index i, Index j) const noexcept {
    return layout_ == Layout::RowMajor ? static_cast<std::size_t>(i * cols_ + j)
                                       : static_cast<std::size_t>(j * rows_ + i);
  }

  T& operator()(Index i, Index j) noexcept { return data_[offset(i, j)]; }
  const T& operator()(Index i, Index j) const noexcept { return data_[offset(i, j)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  /// Same logical matrix in the other storage order.
  DenseMatrix with_layout(Layout layout) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Layout layout_ = Layout::RowMajor;
  std::vector<T> data_;
};

/// Compressed sparse row matrix in canonical form: column indices strictly
/// increasing within each row. Immutable once built.
template <typename T>
class CsrMatrix {
 public:
  using value_type = T;

  CsrMatrix() : row_offsets_(1, 0) {}

  /// Adopts already-canonical arrays; throws ArgumentError if any CSR
  /// invariant is broken.
  CsrMatrix(Index num_rows, Index num_cols, std::vector<Index> row_offsets,
            std::vector<Index> col_indices, std::vector<T> values);

  Index num_rows() const noexcept { return rows_; }
  Index num_cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return static_cast<Index>(col_indices_.size()); }

  std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Index> col_indices() const noexcept { return col_indices_; }
  std::span<const T> values() const noexcept { return values_; }

  Index row_begin(Index r) const noexcept { return row_offsets_[static_cast<std::size_t>(r)]; }
  Index row_end(Index r) const noexcept { return row_offsets_[static_cast<std::size_t>(r) + 1]; }
  Index row_length(Index r) const noexcept { return row_end(r) - row_begin(r); }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_;
  std::vector<Index> col_indices_;
  std::vector<T> values_;
};

/// Builds canonical CSR from unordered triples. Duplicate (row, col) entries
/// are summed in input order. Throws ArgumentError naming the first
/// out-of-range triple.
template <typename T>
CsrMatrix<T> build_csr(Index m, Index k, std::span<const CooTriple<T>> triples);

template <typename T>
CsrMatrix<T> build_csr(Index m, Index k, const std::vector<CooTriple<T>>& triples) {
  return build_csr(m, k, std::span<const CooTriple<T>>(triples));
}

/// Row-major walk over the stored entries.
template <typename T>
std::vector<CooTriple<T>> to_triples(const CsrMatrix<T>& a);

template <typename T>
DenseMatrix<T> densify(const CsrMatrix<T>& a, Layout layout = Layout::RowMajor);

/// Stores every entry of `dense`, zeros included, so that the CSR product
/// performs the same multiply-adds as a dense product would.
template <typename T>
CsrMatrix<T> csr_from_dense_all(const DenseMatrix<T>& dense);

template <typename T>
CsrMatrix<T> identity(Index n);

extern template class DenseMatrix<float>;
extern template class DenseMatrix<double>;
extern template class CsrMatrix<float>;
extern template class CsrMatrix<double>;

}  // namespace spmm
