#include "spmm/rowsplit.hpp"

#include <algorithm>
#include <chrono>
#include <string>
#include <vector>

namespace spmm {
namespace {

template <typename T>
struct LaneEntry {
  Index col;
  T val;
};

template <typename T>
struct RowScratch {
  std::vector<LaneEntry<T>> lanes;
  std::vector<T> acc;
};

}  // namespace

template <typename T>
KernelResult<T> spmm_rowsplit(const CsrMatrix<T>& a, const DenseMatrix<T>& b,
                              const RowSplitParams& params, TraceMode mode) {
  const ExecConfig& cfg = params.cfg;
  cfg.validate();
  if (a.num_cols() != b.num_rows())
    throw DimensionError("spmm_rowsplit: A has " + std::to_string(a.num_cols()) +
                         " columns but B has " + std::to_string(b.num_rows()) + " rows");
  if (b.layout() == Layout::ColMajor && mode == TraceMode::Off)
    throw ArgumentError("spmm_rowsplit: column-major B is only accepted in instrumented runs");
  const std::size_t width = cfg.lane_width;
  const std::size_t tile = params.column_tile == 0 ? width : params.column_tile;
  if (tile > width)
    throw ArgumentError("spmm_rowsplit: column tile " + std::to_string(tile) +
                        " exceeds lane width " + std::to_string(width));

  const auto start = std::chrono::steady_clock::now();
  const Index m = a.num_rows();
  const Index k = a.num_cols();
  const Index n = b.num_cols();
  DenseMatrix<T> c(m, n, Layout::RowMajor);

  const Index* col_ind = a.col_indices().data();
  const T* values = a.values().data();
  const T* bdata = b.data().data();
  T* cdata = c.data().data();
  const bool row_major_b = b.layout() == Layout::RowMajor;
  const auto b_stride = static_cast<std::uint64_t>(row_major_b ? 1 : k);
  const auto itile = static_cast<Index>(tile);
  const auto iwidth = static_cast<Index>(width);

  auto run = run_lane_groups_with_state<RowScratch<T>>(
      static_cast<std::size_t>(m), cfg, mode, [&](LaneGroup& g, RowScratch<T>& s) {
        const auto row = static_cast<Index>(g.group_id());
        const Index begin = a.row_begin(row);
        const Index end = a.row_end(row);
        s.lanes.resize(width);
        s.acc.resize(tile);
        const std::span<const LaneEntry<T>> lanes(s.lanes);
        CostCounters& counters = g.counters();
        g.add_work(static_cast<std::uint64_t>(end - begin));

        for (Index t0 = 0; t0 < n; t0 += itile) {
          const Index tw = std::min(itile, n - t0);
          T* acc = s.acc.data();
          std::fill_n(acc, tw, T{0});
          g.set_output_region({row, row + 1, t0, t0 + tw, n});

          for (Index base = begin; base < end; base += iwidth) {
            const Index active = std::min(iwidth, end - base);
            for (Index l = 0; l < iwidth; ++l) {
              s.lanes[static_cast<std::size_t>(l)] =
                  l < active ? LaneEntry<T>{col_ind[base + l], values[base + l]}
                             : LaneEntry<T>{0, T{0}};
            }
            counters.reads_a += static_cast<std::uint64_t>(active);
            g.record_strided(AccessKind::ReadA, static_cast<std::size_t>(active),
                             static_cast<std::uint64_t>(base), 1);

            for (std::size_t j = 0; j < width; ++j) {
              const LaneEntry<T> e = g.broadcast(lanes, j);
              if (row_major_b) {
                const T* brow = bdata + e.col * n + t0;
                for (Index l = 0; l < tw; ++l) acc[l] += brow[l] * e.val;
              } else {
                for (Index l = 0; l < tw; ++l) acc[l] += bdata[(t0 + l) * k + e.col] * e.val;
              }
              counters.reads_b += static_cast<std::uint64_t>(tw);
              const bool useful = static_cast<Index>(j) < active;
              g.record_strided(AccessKind::ReadB, useful ? static_cast<std::size_t>(tw) : 0,
                               b.offset(e.col, t0), b_stride);
            }
          }

          std::copy_n(acc, tw, cdata + row * n + t0);
          counters.writes_c += static_cast<std::uint64_t>(tw);
          g.record_strided(AccessKind::WriteC, static_cast<std::size_t>(tw),
                           static_cast<std::uint64_t>(row * n + t0), 1);
        }
      });

  KernelResult<T> result{std::move(c), std::move(run.trace), {}};
  KernelReport& report = result.report;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.algorithm = Algorithm::RowSplit;
  report.nnz = a.nnz();
  report.n = n;
  report.counters = run.counters;
  report.registers_per_lane = registers_per_lane(cfg, Algorithm::RowSplit);
  if (result.trace) report.metrics = summarize(*result.trace);
  return result;
}

template KernelResult<float> spmm_rowsplit<float>(const CsrMatrix<float>&, const DenseMatrix<float>&,
                                                  const RowSplitParams&, TraceMode);
template KernelResult<double> spmm_rowsplit<double>(const CsrMatrix<double>&,
                                                    const DenseMatrix<double>&,
                                                    const RowSplitParams&, TraceMode);

}  // namespace spmm
