#pragma once

#include "spmm/matrix.hpp"

namespace spmm {

/// Sequential C = A * B, row-major C. Each C[i][j] accumulates its terms in
/// ascending column order of A's row i, starting from zero.
template <typename T>
DenseMatrix<T> spmm_reference(const CsrMatrix<T>& a, const DenseMatrix<T>& b);

/// Plain dense product with the same per-element accumulation order as
/// spmm_reference. Rows of C are computed in parallel over `workers`
/// threads (0 = hardware concurrency); each row is owned by one thread.
template <typename T>
DenseMatrix<T> gemm_reference(const DenseMatrix<T>& a, const DenseMatrix<T>& b,
                              std::size_t workers = 1);

/// max |x - y| / max(|y|, 1) over all elements; y is the reference.
template <typename T>
double max_relative_error(const DenseMatrix<T>& x, const DenseMatrix<T>& y);

}  // namespace spmm
