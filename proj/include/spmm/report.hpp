#pragma once

#include <array>
#include <optional>

#include "spmm/algorithm.hpp"
#include "spmm/exec.hpp"
#include "spmm/matrix.hpp"

namespace spmm {

struct KernelMetrics {
  double type1 = 1.0;
  double type2 = 1.0;
  /// Per access kind; empty when the run issued no access of that kind.
  std::array<std::optional<double>, kNumAccessKinds> coalescing{};
  std::array<std::optional<double>, kNumAccessKinds> utilization{};

  std::optional<double> coalescing_for(AccessKind k) const {
    return coalescing[static_cast<std::size_t>(k)];
  }
  std::optional<double> utilization_for(AccessKind k) const {
    return utilization[static_cast<std::size_t>(k)];
  }
};

/// Summarizes an instrumented trace.
KernelMetrics summarize(const ExecTrace& trace);

struct KernelReport {
  Algorithm algorithm = Algorithm::Reference;
  double wall_time = 0.0;  ///< seconds
  Index nnz = 0;
  Index n = 0;
  std::optional<KernelMetrics> metrics;
  CostCounters counters;
  std::size_t registers_per_lane = 0;

  /// 2 * nnz * n useful flops per second, in units of 1e9.
  double effective_gflops() const noexcept {
    return wall_time > 0.0 ? 2.0 * static_cast<double>(nnz) * static_cast<double>(n) / wall_time / 1e9
                           : 0.0;
  }
};

template <typename T>
struct KernelResult {
  DenseMatrix<T> c;
  std::optional<ExecTrace> trace;
  KernelReport report;
};

}  // namespace spmm
