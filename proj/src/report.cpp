#include "spmm/report.hpp"

namespace spmm {

KernelMetrics summarize(const ExecTrace& trace) {
  KernelMetrics m;
  if (!trace.work_per_group.empty()) m.type1 = type1_imbalance(trace);
  if (trace.all_totals().accesses > 0) m.type2 = type2_utilization(trace);
  for (std::size_t k = 0; k < kNumAccessKinds; ++k) {
    const auto kind = static_cast<AccessKind>(k);
    if (trace.totals[k].accesses == 0) continue;
    m.coalescing[k] = coalescing_efficiency(trace, kind);
    m.utilization[k] = type2_utilization(trace, kind);
  }
  return m;
}

}  // namespace spmm
