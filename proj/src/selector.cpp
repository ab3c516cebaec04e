#include "spmm/selector.hpp"

#include <cmath>

#include "spmm/merge.hpp"
#include "spmm/rowsplit.hpp"

namespace spmm {

void HeuristicConfig::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    throw ArgumentError("HeuristicConfig: threshold must be positive and finite");
}

template <typename T>
double mean_row_length(const CsrMatrix<T>& a) {
  if (a.num_rows() == 0) throw ArgumentError("mean_row_length: matrix has no rows");
  return static_cast<double>(a.nnz()) / static_cast<double>(a.num_rows());
}

Algorithm choose_algorithm(double mean_row_length, const HeuristicConfig& cfg) {
  cfg.validate();
  if (!(mean_row_length >= 0.0)) throw ArgumentError("choose_algorithm: negative row length");
  return mean_row_length < cfg.threshold ? Algorithm::MergeBased : Algorithm::RowSplit;
}

template <typename T>
KernelResult<T> spmm_auto(const CsrMatrix<T>& a, const DenseMatrix<T>& b, const AutoConfig& cfg,
                          TraceMode mode) {
  const double d = a.num_rows() == 0 ? 0.0 : mean_row_length(a);
  if (choose_algorithm(d, cfg.heuristic) == Algorithm::MergeBased)
    return spmm_merge(a, b, cfg.exec, mode);
  return spmm_rowsplit(a, b, RowSplitParams{cfg.exec, 0}, mode);
}

template double mean_row_length<float>(const CsrMatrix<float>&);
template double mean_row_length<double>(const CsrMatrix<double>&);
template KernelResult<float> spmm_auto<float>(const CsrMatrix<float>&, const DenseMatrix<float>&,
                                              const AutoConfig&, TraceMode);
template KernelResult<double> spmm_auto<double>(const CsrMatrix<double>&,
                                                const DenseMatrix<double>&, const AutoConfig&,
                                                TraceMode);

}  // namespace spmm
