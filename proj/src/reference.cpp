#include "spmm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spmm/error.hpp"
#include "spmm/parallel.hpp"

namespace spmm {

template <typename T>
DenseMatrix<T> spmm_reference(const CsrMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.num_cols() != b.num_rows())
    throw DimensionError("spmm_reference: A is " + std::to_string(a.num_rows()) + " x " +
                         std::to_string(a.num_cols()) + " but B has " +
                         std::to_string(b.num_rows()) + " rows");
  const Index n = b.num_cols();
  DenseMatrix<T> c(a.num_rows(), n, Layout::RowMajor);
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index r = 0; r < a.num_rows(); ++r) {
    for (Index j = 0; j < n; ++j) {
      T acc{0};
      for (Index p = a.row_begin(r); p < a.row_end(r); ++p)
        acc += b(cols[static_cast<std::size_t>(p)], j) * vals[static_cast<std::size_t>(p)];
      c(r, j) = acc;
    }
  }
  return c;
}

template <typename T>
DenseMatrix<T> gemm_reference(const DenseMatrix<T>& a, const DenseMatrix<T>& b,
                              std::size_t workers) {
  if (a.num_cols() != b.num_rows())
    throw DimensionError("gemm_reference: inner dimensions " + std::to_string(a.num_cols()) +
                         " and " + std::to_string(b.num_rows()) + " differ");
  const Index m = a.num_rows();
  const Index k = a.num_cols();
  const Index n = b.num_cols();
  DenseMatrix<T> c(m, n, Layout::RowMajor);
  const DenseMatrix<T> b_rows =
      b.layout() == Layout::RowMajor ? b : b.with_layout(Layout::RowMajor);
  const T* bp = b_rows.data().data();
  T* cp = c.data().data();
  parallel_for(static_cast<std::size_t>(m), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      T* crow = cp + i * static_cast<std::size_t>(n);
      for (Index p = 0; p < k; ++p) {
        const T av = a(static_cast<Index>(i), p);
        const T* brow = bp + static_cast<std::size_t>(p * n);
        for (Index j = 0; j < n; ++j) crow[j] += brow[j] * av;
      }
    }
  });
  return c;
}

template <typename T>
double max_relative_error(const DenseMatrix<T>& x, const DenseMatrix<T>& y) {
  if (x.num_rows() != y.num_rows() || x.num_cols() != y.num_cols())
    throw DimensionError("max_relative_error: shape mismatch");
  double worst = 0.0;
  for (Index i = 0; i < x.num_rows(); ++i) {
    for (Index j = 0; j < x.num_cols(); ++j) {
      const double ref = static_cast<double>(y(i, j));
      const double err = std::abs(static_cast<double>(x(i, j)) - ref) / std::max(std::abs(ref), 1.0);
      if (std::isnan(err)) return err;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

template DenseMatrix<float> spmm_reference<float>(const CsrMatrix<float>&, const DenseMatrix<float>&);
template DenseMatrix<double> spmm_reference<double>(const CsrMatrix<double>&, const DenseMatrix<double>&);
template DenseMatrix<float> gemm_reference<float>(const DenseMatrix<float>&, const DenseMatrix<float>&, std::size_t);
template DenseMatrix<double> gemm_reference<double>(const DenseMatrix<double>&, const DenseMatrix<double>&, std::size_t);
template double max_relative_error<float>(const DenseMatrix<float>&, const DenseMatrix<float>&);
template double max_relative_error<double>(const DenseMatrix<double>&, const DenseMatrix<double>&);

}  // namespace spmm
