#pragma once

#include "spmm/exec.hpp"
#include "spmm/matrix.hpp"
#include "spmm/report.hpp"

namespace spmm {

struct HeuristicConfig {
  /// Mean row length below which the merge kernel is used.
  double threshold = 9.35;

  void validate() const;
};

/// nnz / num_rows. Throws ArgumentError for a matrix without rows.
template <typename T>
double mean_row_length(const CsrMatrix<T>& a);

/// MergeBased iff d < threshold.
Algorithm choose_algorithm(double mean_row_length, const HeuristicConfig& cfg = {});

struct AutoConfig {
  ExecConfig exec;
  HeuristicConfig heuristic;
};

/// Dispatches to spmm_merge or spmm_rowsplit by mean row length; the report
/// names the kernel that ran. A matrix without rows goes to the merge kernel.
template <typename T>
KernelResult<T> spmm_auto(const CsrMatrix<T>& a, const DenseMatrix<T>& b,
                          const AutoConfig& cfg = {}, TraceMode mode = TraceMode::Off);

}  // namespace spmm
