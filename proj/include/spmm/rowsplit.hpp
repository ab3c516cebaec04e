#pragma once

#include <cstddef>

#include "spmm/exec.hpp"
#include "spmm/matrix.hpp"
#include "spmm/report.hpp"

namespace spmm {

struct RowSplitParams {
  ExecConfig cfg;
  /// Columns of B handled per pass over a row; 0 means the lane width.
  std::size_t column_tile = 0;
};

/// Row-split SpMM: one lane group per row of A.
///
/// For every column tile the group walks its row in chunks of lane_width
/// nonzeros. Each lane loads one (column, value) pair, lanes past the end of
/// the row load the dummy pair (0, 0). Then lane_width broadcast rounds
/// follow; in round j every lane reads B[col_j][tile column of that lane],
/// a coalesced row-major load, and accumulates it times val_j. After the
/// row, lane l writes C[row][tile column l].
///
/// B must be row-major unless `mode` is instrumented, in which case a
/// column-major B is accepted to measure its uncoalesced loads.
template <typename T>
KernelResult<T> spmm_rowsplit(const CsrMatrix<T>& a, const DenseMatrix<T>& b,
                              const RowSplitParams& params = {},
                              TraceMode mode = TraceMode::Off);

}  // namespace spmm
