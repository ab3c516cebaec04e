#include "spmm/exec.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

namespace spmm {

const char* to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::RowSplit: return "RowSplit";
    case Algorithm::MergeBased: return "MergeBased";
    case Algorithm::Reference: return "Reference";
    case Algorithm::DenseGemm: return "DenseGemm";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "rowsplit" || name == "RowSplit") return Algorithm::RowSplit;
  if (name == "merge" || name == "MergeBased") return Algorithm::MergeBased;
  if (name == "reference" || name == "Reference") return Algorithm::Reference;
  if (name == "gemm" || name == "DenseGemm") return Algorithm::DenseGemm;
  return std::nullopt;
}

const char* to_string(AccessKind kind) noexcept {
  switch (kind) {
    case AccessKind::ReadA: return "ReadA";
    case AccessKind::ReadB: return "ReadB";
    case AccessKind::WriteC: return "WriteC";
  }
  return "?";
}

void ExecConfig::validate() const {
  if (lane_width == 0) throw ArgumentError("ExecConfig: lane_width must be >= 1");
  if (groups_per_block == 0) throw ArgumentError("ExecConfig: groups_per_block must be >= 1");
  if (work_per_thread == 0) throw ArgumentError("ExecConfig: work_per_thread must be >= 1");
}

ExecConfig ExecConfig::from_env() {
  ExecConfig cfg;
  if (const char* env = std::getenv("SPMM_LANE_WIDTH"); env != nullptr && *env != '\0') {
    const std::string_view text(env);
    std::size_t width = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), width);
    if (ec != std::errc() || ptr != text.data() + text.size() || width == 0)
      throw ArgumentError("SPMM_LANE_WIDTH must be a positive integer, got '" +
                          std::string(text) + "'");
    cfg.lane_width = width;
  }
  return cfg;
}

AccessTotals& AccessTotals::operator+=(const AccessTotals& o) noexcept {
  accesses += o.accesses;
  active_lanes += o.active_lanes;
  ideal_segments += o.ideal_segments;
  actual_segments += o.actual_segments;
  return *this;
}

CostCounters& CostCounters::operator+=(const CostCounters& o) noexcept {
  reads_a += o.reads_a;
  reads_b += o.reads_b;
  writes_c += o.writes_c;
  broadcast_rounds += o.broadcast_rounds;
  partition_overhead_accesses += o.partition_overhead_accesses;
  carryout_accesses += o.carryout_accesses;
  offset_fallback_reads += o.offset_fallback_reads;
  return *this;
}

bool OutputRegion::contains(std::uint64_t address) const noexcept {
  if (ld <= 0) return false;
  const auto row = static_cast<Index>(address / static_cast<std::uint64_t>(ld));
  const auto col = static_cast<Index>(address % static_cast<std::uint64_t>(ld));
  return row >= row_begin && row < row_end && col >= col_begin && col < col_end;
}

AccessTotals ExecTrace::all_totals() const noexcept {
  AccessTotals sum;
  for (const auto& t : totals) sum += t;
  return sum;
}

std::uint64_t distinct_segments(std::span<const std::uint64_t> addresses,
                                std::size_t segment_words) {
  if (segment_words == 0) throw ArgumentError("distinct_segments: zero segment size");
  std::vector<std::uint64_t> segs(addresses.size());
  std::transform(addresses.begin(), addresses.end(), segs.begin(),
                 [&](std::uint64_t a) { return a / segment_words; });
  std::sort(segs.begin(), segs.end());
  return static_cast<std::uint64_t>(std::unique(segs.begin(), segs.end()) - segs.begin());
}

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

// ---------------------------------------------------------------------------
// LaneGroup
// ---------------------------------------------------------------------------

void LaneGroup::throw_bad_lane(std::size_t src_lane) const {
  throw ContractViolation("broadcast from lane " + std::to_string(src_lane) +
                          " in a group of width " + std::to_string(lane_width_));
}

void LaneGroup::check_region(std::span<const std::uint64_t> addresses) const {
  if (!has_region_) return;
  for (std::uint64_t a : addresses) {
    if (!region_.contains(a))
      throw ContractViolation("group " + std::to_string(group_id_) + " wrote C word " +
                              std::to_string(a) + " outside its output region");
  }
}

void LaneGroup::check_region_strided(std::size_t active, std::uint64_t base,
                                     std::uint64_t stride) const {
  if (!has_region_) return;
  for (std::size_t l = 0; l < active; ++l) {
    const std::uint64_t a = base + l * stride;
    if (!region_.contains(a))
      throw ContractViolation("group " + std::to_string(group_id_) + " wrote C word " +
                              std::to_string(a) + " outside its output region");
  }
}

void LaneGroup::push_record(AccessKind kind, std::span<const std::uint32_t> lanes,
                            std::span<const std::uint64_t> addresses) {
  MemAccess rec;
  rec.group_id = group_id_;
  rec.step = step_;
  rec.kind = kind;
  rec.lane_mask.assign(lane_width_, false);
  for (std::uint32_t l : lanes) rec.lane_mask[l] = true;
  rec.addresses.assign(addresses.begin(), addresses.end());
  (*trace_.per_group)[group_id_].push_back(std::move(rec));
}

void LaneGroup::record_impl(AccessKind kind, std::span<const std::uint32_t> lanes,
                            std::span<const std::uint64_t> addresses) {
  if (lanes.size() != addresses.size())
    throw ContractViolation("record: one address per active lane required");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    if (lanes[i] >= lane_width_ || (i > 0 && lanes[i] <= lanes[i - 1]))
      throw ContractViolation("record: lane ids must be ascending and below the lane width");
  }
  if (kind == AccessKind::WriteC) check_region(addresses);

  auto& segs = sink_->segment_scratch;
  segs.resize(addresses.size());
  std::transform(addresses.begin(), addresses.end(), segs.begin(),
                 [&](std::uint64_t a) { return a / lane_width_; });
  std::sort(segs.begin(), segs.end());
  const auto actual = static_cast<std::uint64_t>(std::unique(segs.begin(), segs.end()) - segs.begin());

  auto& t = sink_->totals[static_cast<std::size_t>(kind)];
  t.accesses += 1;
  t.active_lanes += addresses.size();
  t.ideal_segments += ceil_div(addresses.size(), lane_width_);
  t.actual_segments += actual;
  if (trace_.mode == TraceMode::Full) push_record(kind, lanes, addresses);
  ++step_;
}

void LaneGroup::record_strided_impl(AccessKind kind, std::size_t active, std::uint64_t base,
                                    std::uint64_t stride) {
  if (active > lane_width_)
    throw ContractViolation("record: more active lanes than the lane width");
  if (kind == AccessKind::WriteC) check_region_strided(active, base, stride);

  // Addresses are monotone, so segment changes can be counted in one pass.
  std::uint64_t actual = 0;
  std::uint64_t prev = 0;
  for (std::size_t l = 0; l < active; ++l) {
    const std::uint64_t seg = (base + l * stride) / lane_width_;
    if (l == 0 || seg != prev) ++actual;
    prev = seg;
  }
  auto& t = sink_->totals[static_cast<std::size_t>(kind)];
  t.accesses += 1;
  t.active_lanes += active;
  t.ideal_segments += ceil_div(active, lane_width_);
  t.actual_segments += actual;

  if (trace_.mode == TraceMode::Full) {
    std::vector<std::uint32_t> lanes(active);
    std::vector<std::uint64_t> addresses(active);
    for (std::size_t l = 0; l < active; ++l) {
      lanes[l] = static_cast<std::uint32_t>(l);
      addresses[l] = base + l * stride;
    }
    push_record(kind, lanes, addresses);
  }
  ++step_;
}

// ---------------------------------------------------------------------------
// Trace assembly
// ---------------------------------------------------------------------------

namespace detail {

TraceBuilder::TraceBuilder(std::size_t num_groups, const ExecConfig& cfg, TraceMode mode) {
  trace.mode = mode;
  trace.lane_width = cfg.lane_width;
  if (mode != TraceMode::Off) trace.work_per_group.assign(num_groups, 0);
  if (mode == TraceMode::Full) per_group.resize(num_groups);
}

TraceSink TraceBuilder::sink() noexcept {
  return TraceSink{trace.mode, &trace.work_per_group, &per_group};
}

ExecTrace TraceBuilder::finish(std::span<const WorkerSink> workers) && {
  for (const auto& w : workers) {
    trace.counters += w.counters;
    for (std::size_t k = 0; k < kNumAccessKinds; ++k) trace.totals[k] += w.totals[k];
  }
  if (trace.mode == TraceMode::Full) {
    std::size_t total = 0;
    for (const auto& g : per_group) total += g.size();
    trace.accesses.reserve(total);
    for (auto& g : per_group)
      std::move(g.begin(), g.end(), std::back_inserter(trace.accesses));
    per_group.clear();
  }
  return std::move(trace);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

namespace {

double efficiency_from_records(const ExecTrace& trace, std::optional<AccessKind> kind,
                               std::size_t segment_words) {
  if (trace.mode != TraceMode::Full)
    throw ArgumentError("coalescing_efficiency: segment size other than the lane width "
                        "needs a Full trace");
  std::uint64_t ideal = 0;
  std::uint64_t actual = 0;
  std::size_t seen = 0;
  for (const auto& a : trace.accesses) {
    if (kind && a.kind != *kind) continue;
    ++seen;
    ideal += ceil_div(a.active_lanes(), segment_words);
    actual += distinct_segments(a.addresses, segment_words);
  }
  if (seen == 0) throw ArgumentError("coalescing_efficiency: no accesses in trace");
  return actual == 0 ? 1.0 : static_cast<double>(ideal) / static_cast<double>(actual);
}

double efficiency_from_totals(const AccessTotals& t) {
  if (t.accesses == 0) throw ArgumentError("coalescing_efficiency: no accesses in trace");
  return t.actual_segments == 0
             ? 1.0
             : static_cast<double>(t.ideal_segments) / static_cast<double>(t.actual_segments);
}

double utilization_from_totals(const AccessTotals& t, std::size_t lane_width) {
  if (t.accesses == 0) throw ArgumentError("type2_utilization: no accesses in trace");
  return static_cast<double>(t.active_lanes) /
         (static_cast<double>(t.accesses) * static_cast<double>(lane_width));
}

}  // namespace

double coalescing_efficiency(const ExecTrace& trace, std::size_t segment_words) {
  if (segment_words == 0 || segment_words == trace.lane_width)
    return efficiency_from_totals(trace.all_totals());
  return efficiency_from_records(trace, std::nullopt, segment_words);
}

double coalescing_efficiency(const ExecTrace& trace, AccessKind kind, std::size_t segment_words) {
  if (segment_words == 0 || segment_words == trace.lane_width)
    return efficiency_from_totals(trace.totals_for(kind));
  return efficiency_from_records(trace, kind, segment_words);
}

double type1_imbalance(const ExecTrace& trace) {
  const auto& work = trace.work_per_group;
  if (work.empty()) throw ArgumentError("type1_imbalance: trace has no lane groups");
  const std::uint64_t total = std::accumulate(work.begin(), work.end(), std::uint64_t{0});
  if (total == 0) return 1.0;
  const std::uint64_t peak = *std::max_element(work.begin(), work.end());
  return static_cast<double>(peak) * static_cast<double>(work.size()) /
         static_cast<double>(total);
}

double type2_utilization(const ExecTrace& trace) {
  return utilization_from_totals(trace.all_totals(), trace.lane_width);
}

double type2_utilization(const ExecTrace& trace, AccessKind kind) {
  return utilization_from_totals(trace.totals_for(kind), trace.lane_width);
}

CostCounters predict_overhead(Index nnz, Index n, const ExecConfig& cfg, Algorithm algo) {
  cfg.validate();
  if (nnz < 0 || n < 0) throw ArgumentError("predict_overhead: negative nnz or n");
  CostCounters c;
  switch (algo) {
    case Algorithm::RowSplit:
      return c;
    case Algorithm::MergeBased: {
      const std::uint64_t blocks =
          ceil_div(static_cast<std::uint64_t>(nnz), cfg.items_per_block());
      c.partition_overhead_accesses = blocks;
      c.carryout_accesses = static_cast<std::uint64_t>(n) * blocks;
      return c;
    }
    default:
      throw ArgumentError(std::string("predict_overhead: no cost model for ") + to_string(algo));
  }
}

std::size_t registers_per_lane(const ExecConfig& cfg, Algorithm algo) {
  switch (algo) {
    case Algorithm::RowSplit: return 2 * cfg.lane_width;
    case Algorithm::MergeBased: return 2 * cfg.lane_width * cfg.work_per_thread;
    default: return 0;
  }
}

void write_trace_csv(std::ostream& out, const ExecTrace& trace) {
  if (trace.mode != TraceMode::Full)
    throw ArgumentError("write_trace_csv: needs a Full trace");
  out << "group_id,step,kind,active_lanes,distinct_segments\n";
  for (const auto& a : trace.accesses) {
    out << a.group_id << ',' << a.step << ',' << to_string(a.kind) << ',' << a.active_lanes()
        << ',' << distinct_segments(a.addresses, trace.lane_width) << '\n';
  }
}

}  // namespace spmm
