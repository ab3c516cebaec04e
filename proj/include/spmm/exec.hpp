#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "spmm/algorithm.hpp"
#include "spmm/error.hpp"
#include "spmm/matrix.hpp"
#include "spmm/parallel.hpp"

namespace spmm {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Shape of the simulated machine. A lane group is the analog of a warp,
/// a block (groups_per_block lane groups) the analog of a CTA.
struct ExecConfig {
  std::size_t lane_width = 32;
  std::size_t groups_per_block = 4;
  /// Nonzeros handled per lane by the merge kernel (T).
  std::size_t work_per_thread = 1;
  /// Host threads used to run lane groups; 0 = hardware concurrency.
  std::size_t workers = 0;

  std::size_t block_size() const noexcept { return lane_width * groups_per_block; }
  std::size_t items_per_block() const noexcept { return block_size() * work_per_thread; }

  /// Throws ArgumentError on zero lane width, group count or T.
  void validate() const;

  /// Defaults, with lane_width taken from SPMM_LANE_WIDTH when set.
  static ExecConfig from_env();
};

enum class AccessKind : std::uint8_t { ReadA, ReadB, WriteC };
inline constexpr std::size_t kNumAccessKinds = 3;
const char* to_string(AccessKind kind) noexcept;

enum class TraceMode : std::uint8_t {
  Off,        ///< no trace; counters only
  Aggregate,  ///< per-kind totals and per-group work, no per-access records
  Full,       ///< additionally keeps every MemAccess with its addresses
};

// ---------------------------------------------------------------------------
// Trace data
// ---------------------------------------------------------------------------

/// One lockstep memory instruction of a lane group. Addresses are abstract
/// word indices into the accessed array; addresses[i] belongs to the i-th
/// set bit of lane_mask.
struct MemAccess {
  std::size_t group_id = 0;
  std::size_t step = 0;
  AccessKind kind = AccessKind::ReadA;
  std::vector<bool> lane_mask;
  std::vector<std::uint64_t> addresses;

  std::size_t active_lanes() const noexcept { return addresses.size(); }
};

struct AccessTotals {
  std::uint64_t accesses = 0;
  std::uint64_t active_lanes = 0;
  std::uint64_t ideal_segments = 0;
  std::uint64_t actual_segments = 0;

  AccessTotals& operator+=(const AccessTotals& o) noexcept;
  friend bool operator==(const AccessTotals&, const AccessTotals&) = default;
};

/// Element-granular memory traffic of one kernel run. The overhead fields
/// count traffic the row-split kernel does not have.
struct CostCounters {
  std::uint64_t reads_a = 0;
  std::uint64_t reads_b = 0;
  std::uint64_t writes_c = 0;
  std::uint64_t broadcast_rounds = 0;
  std::uint64_t partition_overhead_accesses = 0;
  std::uint64_t carryout_accesses = 0;
  /// Row-offset reads that bypassed block-local scratch because a block
  /// spanned more rows than the scratch holds.
  std::uint64_t offset_fallback_reads = 0;

  CostCounters& operator+=(const CostCounters& o) noexcept;
  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

/// Rectangle of a row-major matrix with leading dimension `ld`.
struct OutputRegion {
  Index row_begin = 0;
  Index row_end = 0;
  Index col_begin = 0;
  Index col_end = 0;
  Index ld = 0;

  bool contains(std::uint64_t address) const noexcept;
};

struct ExecTrace {
  TraceMode mode = TraceMode::Aggregate;
  std::size_t lane_width = 32;
  /// Per-access records ordered by (group_id, step); Full mode only.
  std::vector<MemAccess> accesses;
  std::vector<std::uint64_t> work_per_group;
  /// Segment counts use lane_width-word segments.
  std::array<AccessTotals, kNumAccessKinds> totals{};
  CostCounters counters;

  const AccessTotals& totals_for(AccessKind kind) const noexcept {
    return totals[static_cast<std::size_t>(kind)];
  }
  AccessTotals all_totals() const noexcept;
};

/// Number of distinct aligned segments of `segment_words` words touched.
std::uint64_t distinct_segments(std::span<const std::uint64_t> addresses,
                                std::size_t segment_words);

// ---------------------------------------------------------------------------
// Lane groups
// ---------------------------------------------------------------------------

namespace detail {

struct WorkerSink {
  CostCounters counters;
  std::array<AccessTotals, kNumAccessKinds> totals{};
  std::vector<std::uint64_t> segment_scratch;
};

struct TraceSink {
  TraceMode mode = TraceMode::Off;
  std::vector<std::uint64_t>* work_per_group = nullptr;
  std::vector<std::vector<MemAccess>>* per_group = nullptr;
};

}  // namespace detail

/// Handle a kernel body uses to act as one lane group. All lanes of the
/// group are simulated by the calling host thread; "lockstep" operations
/// (broadcast, record) are plain calls that act on every lane at once.
class LaneGroup {
 public:
  LaneGroup(const ExecConfig& cfg, detail::TraceSink trace, detail::WorkerSink& sink)
      : lane_width_(cfg.lane_width), trace_(trace), sink_(&sink) {}

  std::size_t group_id() const noexcept { return group_id_; }
  std::size_t lane_width() const noexcept { return lane_width_; }
  bool instrumented() const noexcept { return trace_.mode != TraceMode::Off; }

  /// Every lane receives lanes[src_lane]. One call is one broadcast round.
  template <typename V>
  V broadcast(std::span<const V> lanes, std::size_t src_lane) {
    if (src_lane >= lane_width_ || src_lane >= lanes.size()) [[unlikely]]
      throw_bad_lane(src_lane);
    ++sink_->counters.broadcast_rounds;
    return lanes[src_lane];
  }

  /// Records one access by the listed lanes (ascending lane ids) at the
  /// given addresses. No-op when not instrumented.
  void record(AccessKind kind, std::span<const std::uint32_t> lanes,
              std::span<const std::uint64_t> addresses) {
    if (instrumented()) record_impl(kind, lanes, addresses);
  }

  /// Records an access by lanes [0, active) where lane l touches
  /// base + l * stride.
  void record_strided(AccessKind kind, std::size_t active, std::uint64_t base,
                      std::uint64_t stride) {
    if (instrumented()) record_strided_impl(kind, active, base, stride);
  }

  /// WriteC accesses outside this region raise ContractViolation
  /// (instrumented runs only).
  void set_output_region(const OutputRegion& region) noexcept {
    region_ = region;
    has_region_ = true;
  }

  void add_work(std::uint64_t items) noexcept {
    if (instrumented()) (*trace_.work_per_group)[group_id_] += items;
  }

  CostCounters& counters() noexcept { return sink_->counters; }

  /// Rebinds the handle to a new group id; used by run_lane_groups.
  void bind(std::size_t group_id) noexcept {
    group_id_ = group_id;
    step_ = 0;
    has_region_ = false;
  }

 private:
  [[noreturn]] void throw_bad_lane(std::size_t src_lane) const;
  void record_impl(AccessKind kind, std::span<const std::uint32_t> lanes,
                   std::span<const std::uint64_t> addresses);
  void record_strided_impl(AccessKind kind, std::size_t active, std::uint64_t base,
                           std::uint64_t stride);
  void check_region(std::span<const std::uint64_t> addresses) const;
  void check_region_strided(std::size_t active, std::uint64_t base, std::uint64_t stride) const;
  void push_record(AccessKind kind, std::span<const std::uint32_t> lanes,
                   std::span<const std::uint64_t> addresses);

  std::size_t lane_width_;
  detail::TraceSink trace_;
  detail::WorkerSink* sink_;
  std::size_t group_id_ = 0;
  std::size_t step_ = 0;
  OutputRegion region_{};
  bool has_region_ = false;
};

namespace detail {

struct TraceBuilder {
  TraceBuilder(std::size_t num_groups, const ExecConfig& cfg, TraceMode mode);

  TraceSink sink() noexcept;
  /// Folds worker totals (integer sums, so order-free) and concatenates
  /// per-group records in ascending group id.
  ExecTrace finish(std::span<const WorkerSink> workers) &&;

  ExecTrace trace;
  std::vector<std::vector<MemAccess>> per_group;
};

}  // namespace detail

/// Result of a lane-group run: summed counters always, a trace when the
/// mode is not Off.
struct GroupRunResult {
  CostCounters counters;
  std::optional<ExecTrace> trace;
};

/// Runs body(group, state) once for every group id in [0, num_groups).
/// Groups may run concurrently on cfg.workers host threads; `State` is a
/// default-constructed per-worker scratch object. Bodies must only write
/// output owned by their group, which makes the outcome identical to
/// running the groups one after another in ascending id.
template <typename State, typename Body>
GroupRunResult run_lane_groups_with_state(std::size_t num_groups, const ExecConfig& cfg,
                                          TraceMode mode, Body&& body) {
  cfg.validate();
  const std::size_t workers =
      std::min(resolve_workers(cfg.workers), std::max<std::size_t>(num_groups, 1));
  detail::TraceBuilder builder(num_groups, cfg, mode);
  std::vector<detail::WorkerSink> sinks(workers);
  std::vector<State> states(workers);
  const detail::TraceSink trace_sink = builder.sink();
  parallel_for_workers(num_groups, workers,
                       [&](std::size_t w, std::size_t begin, std::size_t end) {
                         LaneGroup group(cfg, trace_sink, sinks[w]);
                         for (std::size_t g = begin; g < end; ++g) {
                           group.bind(g);
                           body(group, states[w]);
                         }
                       });
  GroupRunResult result;
  for (const auto& s : sinks) result.counters += s.counters;
  if (mode != TraceMode::Off) result.trace = std::move(builder).finish(sinks);
  return result;
}

template <typename Body>
GroupRunResult run_lane_groups(std::size_t num_groups, const ExecConfig& cfg, TraceMode mode,
                               Body&& body) {
  struct NoState {};
  return run_lane_groups_with_state<NoState>(
      num_groups, cfg, mode, [&](LaneGroup& g, NoState&) { body(g); });
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Sum of ideal over sum of actual segment counts, where an access by `a`
/// lanes ideally needs ceil(a / segment_words) segments. segment_words = 0
/// means lane_width; other sizes need a Full trace. Throws ArgumentError on
/// a trace (or kind) without accesses.
double coalescing_efficiency(const ExecTrace& trace, std::size_t segment_words = 0);
double coalescing_efficiency(const ExecTrace& trace, AccessKind kind,
                             std::size_t segment_words = 0);

/// max / mean of work_per_group; 1.0 when all work is zero.
double type1_imbalance(const ExecTrace& trace);

/// Fraction of lane-steps that did useful work.
double type2_utilization(const ExecTrace& trace);
double type2_utilization(const ExecTrace& trace, AccessKind kind);

/// Extra memory traffic of `algo` relative to row split for an nnz-nonzero
/// matrix times an n-column B: one partition write per block and n
/// carry-out values per block, with ceil(nnz / (B * T)) blocks.
CostCounters predict_overhead(Index nnz, Index n, const ExecConfig& cfg, Algorithm algo);

template <typename T>
CostCounters predict_overhead(const CsrMatrix<T>& a, Index n, const ExecConfig& cfg,
                              Algorithm algo) {
  return predict_overhead(a.nnz(), n, cfg, algo);
}

/// Static per-lane register estimate: one accumulator and one B value per
/// tile column, times T for the merge kernel.
std::size_t registers_per_lane(const ExecConfig& cfg, Algorithm algo);

/// CSV: group_id,step,kind,active_lanes,distinct_segments. Needs a Full trace.
void write_trace_csv(std::ostream& out, const ExecTrace& trace);

}  // namespace spmm
