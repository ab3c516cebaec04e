#include "spmm/merge.hpp"

#include <chrono>
#include <string>

namespace spmm {

BlockLimits partition_spmm(std::span<const Index> row_offsets, std::size_t items_per_block,
                           std::size_t workers) {
  if (items_per_block == 0) throw ArgumentError("partition_spmm: items_per_block must be >= 1");
  if (row_offsets.empty()) throw ArgumentError("partition_spmm: empty row offsets");
  const Index m = static_cast<Index>(row_offsets.size()) - 1;
  const Index nnz = row_offsets.back();
  const auto g = static_cast<Index>(items_per_block);
  const std::size_t blocks = nnz == 0 ? 1 : static_cast<std::size_t>((nnz + g - 1) / g);

  BlockLimits out;
  out.items_per_block = items_per_block;
  out.nnz = nnz;
  out.limits.assign(blocks + 1, 0);
  out.limits[blocks] = m;
  parallel_for(blocks > 1 ? blocks - 1 : 0, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin + 1; i < end + 1; ++i) {
      const Index target = static_cast<Index>(i) * g;
      const auto it = std::upper_bound(row_offsets.begin(), row_offsets.end(), target);
      out.limits[i] = static_cast<Index>(it - row_offsets.begin()) - 1;
    }
  });
  return out;
}

template <typename T>
SegmentedReduceResult<T> segmented_reduce(std::span<const T> values,
                                          std::span<const Index> row_ids, std::size_t width) {
  if (values.size() != row_ids.size() * width)
    throw ArgumentError("segmented_reduce: values must hold row_ids.size() * width entries");
  SegmentedReduceResult<T> out;
  SegmentedReducer<T> reducer(width);
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    reducer.push(row_ids[i], values.subspan(i * width, width),
                 [&](Index row, std::span<const T> partial) {
                   out.completed.push_back({row, {partial.begin(), partial.end()}});
                 });
  }
  out.carry.row = reducer.open_row();
  if (out.carry.row >= 0)
    out.carry.values.assign(reducer.open_partial().begin(), reducer.open_partial().end());
  return out;
}

template <typename T>
void fix_carryout(DenseMatrix<T>& c, const BlockLimits& limits, const CarryOut<T>& carry) {
  if (carry.rows.size() != limits.num_blocks())
    throw ArgumentError("fix_carryout: one carry-out per block required");
  if (carry.width != c.num_cols()) throw DimensionError("fix_carryout: carry width != C columns");
  for (std::size_t i = 0; i < carry.rows.size(); ++i) {
    const Index row = carry.rows[i];
    if (row < 0) continue;
    if (row >= c.num_rows() || row < limits.limits[i] || row > limits.limits[i + 1])
      throw ArgumentError("fix_carryout: block " + std::to_string(i) + " carries into row " +
                          std::to_string(row) + " outside its range");
    const auto partial = carry.partial(i);
    for (Index j = 0; j < c.num_cols(); ++j) c(row, j) += partial[static_cast<std::size_t>(j)];
  }
}

namespace {

template <typename T>
struct LaneEntry {
  Index col;
  T val;
};

template <typename T>
struct BlockScratch {
  std::vector<Index> shared_offsets;  // block-local copy of the row-offset slice
  std::vector<Index> row_ids;         // flattened per-nonzero rows
  std::vector<LaneEntry<T>> lanes;
  std::vector<T> val_b;               // lane_width x tile products of one chunk
  SegmentedReducer<T> reducer;
};

// upper_bound over offsets[lo, hi) that reports how many entries it read.
Index counted_upper_bound(const Index* offsets, Index lo, Index hi, Index target,
                          std::uint64_t& probes) {
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    ++probes;
    if (offsets[mid] <= target) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

}  // namespace

template <typename T>
KernelResult<T> spmm_merge(const CsrMatrix<T>& a, const DenseMatrix<T>& b, const ExecConfig& cfg,
                           TraceMode mode) {
  cfg.validate();
  if (a.num_cols() != b.num_rows())
    throw DimensionError("spmm_merge: A has " + std::to_string(a.num_cols()) +
                         " columns but B has " + std::to_string(b.num_rows()) + " rows");
  if (b.layout() != Layout::RowMajor) throw ArgumentError("spmm_merge: B must be row-major");

  const auto start = std::chrono::steady_clock::now();
  const Index m = a.num_rows();
  const Index n = b.num_cols();
  const std::size_t width = cfg.lane_width;
  const auto iwidth = static_cast<Index>(width);
  const std::size_t items = cfg.items_per_block();
  const std::size_t scratch_capacity = items + 1;
  DenseMatrix<T> c(m, n, Layout::RowMajor);

  // Phase 1: divide work.
  const BlockLimits limits = partition_spmm(a.row_offsets(), items, cfg.workers);
  const std::size_t blocks = limits.num_blocks();
  CarryOut<T> carry(blocks, n);

  const Index* offsets = a.row_offsets().data();
  const Index* col_ind = a.col_indices().data();
  const T* values = a.values().data();
  const T* bdata = b.data().data();
  T* cdata = c.data().data();

  // Phase 2: per-block computation.
  auto run = run_lane_groups_with_state<BlockScratch<T>>(
      blocks, cfg, mode, [&](LaneGroup& g, BlockScratch<T>& s) {
        const std::size_t block = g.group_id();
        const Index nz_begin = limits.block_begin(block);
        const Index nz_end = limits.block_end(block);
        g.add_work(static_cast<std::uint64_t>(nz_end - nz_begin));
        if (nz_begin == nz_end) return;
        CostCounters& counters = g.counters();

        const Index row_lo = limits.limits[block];
        const Index row_hi = std::min(limits.limits[block + 1], m - 1);
        const auto slice_len = static_cast<std::size_t>(row_hi - row_lo + 2);

        // Stage the offsets slice when it fits; otherwise search global offsets.
        const Index* slice = offsets + row_lo;
        if (slice_len <= scratch_capacity) {
          s.shared_offsets.assign(slice, slice + slice_len);
          slice = s.shared_offsets.data();
        }

        // Flatten CSR to COO: row id of every nonzero in the block.
        s.row_ids.resize(static_cast<std::size_t>(nz_end - nz_begin));
        std::uint64_t probes = 0;
        Index r = 0;
        for (Index e = nz_begin; e < nz_end; ++e) {
          if (slice[r + 1] <= e)
            r = counted_upper_bound(slice, r + 1, static_cast<Index>(slice_len), e, probes) - 1;
          s.row_ids[static_cast<std::size_t>(e - nz_begin)] = row_lo + r;
        }
        if (slice_len > scratch_capacity) counters.offset_fallback_reads += probes;

        s.lanes.resize(width);
        s.val_b.resize(width * width);
        const std::span<const LaneEntry<T>> lanes(s.lanes);

        for (Index t0 = 0; t0 < n; t0 += iwidth) {
          const Index tw = std::min(iwidth, n - t0);
          const auto utw = static_cast<std::size_t>(tw);
          g.set_output_region({row_lo, row_hi + 1, t0, t0 + tw, n});
          s.reducer.reset(utw);
          auto write_row = [&](Index row, std::span<const T> partial) {
            std::copy(partial.begin(), partial.end(), cdata + row * n + t0);
            counters.writes_c += utw;
            g.record_strided(AccessKind::WriteC, utw, static_cast<std::uint64_t>(row * n + t0), 1);
          };

          for (Index base = nz_begin; base < nz_end; base += iwidth) {
            const Index active = std::min(iwidth, nz_end - base);
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
              const T* brow = bdata + e.col * n + t0;
              T* out = s.val_b.data() + j * width;
              for (Index l = 0; l < tw; ++l) out[l] = brow[l] * e.val;
              counters.reads_b += utw;
              const bool useful = static_cast<Index>(j) < active;
              g.record_strided(AccessKind::ReadB, useful ? utw : 0,
                               static_cast<std::uint64_t>(e.col * n + t0), 1);
            }

            for (Index j = 0; j < active; ++j) {
              s.reducer.push(s.row_ids[static_cast<std::size_t>(base - nz_begin + j)],
                             std::span<const T>(s.val_b.data() + j * iwidth, utw), write_row);
            }
          }

          // The open row is carried only if it continues into the next block;
          // otherwise this block holds its final nonzero and writes it. The
          // carry slot is written either way.
          const Index open_row = s.reducer.open_row();
          const auto open = s.reducer.open_partial();
          if (slice[open_row - row_lo + 1] > nz_end) {
            carry.rows[block] = open_row;
            std::copy(open.begin(), open.end(), carry.partial(block).begin() + t0);
          } else {
            write_row(open_row, open);
          }
          counters.carryout_accesses += utw;
        }
      });

  // Carry-out fix-up after every block has finished.
  fix_carryout(c, limits, carry);

  KernelResult<T> result{std::move(c), std::move(run.trace), {}};
  KernelReport& report = result.report;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.algorithm = Algorithm::MergeBased;
  report.nnz = a.nnz();
  report.n = n;
  report.counters = run.counters;
  report.counters.partition_overhead_accesses =
      static_cast<std::uint64_t>((a.nnz() + static_cast<Index>(items) - 1) / static_cast<Index>(items));
  report.registers_per_lane = registers_per_lane(cfg, Algorithm::MergeBased);
  if (result.trace) {
    result.trace->counters = report.counters;
    report.metrics = summarize(*result.trace);
  }
  return result;
}

#define SPMM_INSTANTIATE(T)                                                                    \
  template SegmentedReduceResult<T> segmented_reduce<T>(std::span<const T>,                  \
                                                        std::span<const Index>, std::size_t); \
  template void fix_carryout<T>(DenseMatrix<T>&, const BlockLimits&, const CarryOut<T>&);    \
  template KernelResult<T> spmm_merge<T>(const CsrMatrix<T>&, const DenseMatrix<T>&,         \
                                         const ExecConfig&, TraceMode);

SPMM_INSTANTIATE(float)
SPMM_INSTANTIATE(double)

#undef SPMM_INSTANTIATE

}  // namespace spmm
