#include <gtest/gtest.h>

#include <algorithm>

#include "spmm/generators.hpp"
#include "spmm/merge.hpp"
#include "spmm/reference.hpp"
#include "spmm/rowsplit.hpp"
#include "support/oracles.hpp"

using namespace spmm;

namespace {

ExecConfig serial() {
  ExecConfig cfg;
  cfg.workers = 1;
  return cfg;
}

std::vector<Index> vec(std::span<const Index> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Partition, SmallExample) {
  const std::vector<Index> offsets{0, 2, 2, 5, 6};
  const auto p = partition_spmm(offsets, 3);
  EXPECT_EQ(p.limits, (std::vector<Index>{0, 2, 4}));
  EXPECT_EQ(p.num_blocks(), 2u);
  EXPECT_EQ(p.block_begin(1), 3);
  EXPECT_EQ(p.block_end(1), 6);
}

TEST(Partition, SingleBlockAndEmptyMatrix) {
  const std::vector<Index> offsets{0, 3, 5};
  EXPECT_EQ(partition_spmm(offsets, 128).limits, (std::vector<Index>{0, 2}));
  const std::vector<Index> empty{0, 0, 0, 0};
  const auto p = partition_spmm(empty, 128);
  EXPECT_EQ(p.limits, (std::vector<Index>{0, 3}));
  EXPECT_EQ(p.block_begin(0), p.block_end(0));
  EXPECT_THROW(partition_spmm(offsets, 0), ArgumentError);
}

TEST(Partition, LeadingEmptyRowsStillStartAtZero) {
  // Block 0 always starts at row 0, interior limits skip runs of empty rows.
  const std::vector<Index> offsets{0, 0, 0, 4, 4, 4, 8};
  const auto p = partition_spmm(offsets, 4);
  EXPECT_EQ(p.limits, (std::vector<Index>{0, 5, 6}));
}

TEST(Partition, AgreesWithLinearScan) {
  Rng rng(RngSeed{21});
  for (int trial = 0; trial < 1000; ++trial) {
    const Index rows = 1 + static_cast<Index>(rng.below(300));
    const auto offsets = oracle::random_offsets(rng, rows, 1 + static_cast<Index>(rng.below(50)),
                                                rng.unit() * 0.9);
    const std::size_t g = 1 + rng.below(64);
    const auto p = partition_spmm(offsets, g, 1 + rng.below(4));
    ASSERT_EQ(p.limits, oracle::linear_scan_limits(offsets, g)) << "trial " << trial;

    // Every nonzero of block i lies in a row between limits[i] and limits[i+1].
    const Index nnz = offsets.back();
    ASSERT_EQ(p.limits.front(), 0);
    ASSERT_EQ(p.limits.back(), rows);
    ASSERT_TRUE(std::is_sorted(p.limits.begin(), p.limits.end()));
    for (std::size_t b = 0; b < p.num_blocks(); ++b) {
      for (Index e = p.block_begin(b); e < p.block_end(b); ++e) {
        const auto row = static_cast<Index>(
            std::upper_bound(offsets.begin(), offsets.end(), e) - offsets.begin() - 1);
        ASSERT_GE(row, p.limits[b]);
        ASSERT_LE(row, p.limits[b + 1]);
      }
    }
    ASSERT_EQ(p.block_end(p.num_blocks() - 1), nnz);
  }
}

TEST(SegmentedReduce, Example) {
  const std::vector<float> values{1, 2, 3, 4, 5};
  const std::vector<Index> rows{0, 0, 1, 1, 1};
  const auto r = segmented_reduce<float>(values, rows);
  ASSERT_EQ(r.completed.size(), 1u);
  EXPECT_EQ(r.completed[0], (RowPartial<float>{0, {3}}));
  EXPECT_EQ(r.carry, (RowPartial<float>{1, {12}}));
}

TEST(SegmentedReduce, SingleRowIsAllCarry) {
  const std::vector<double> values{1, 1, 1, 1};
  const std::vector<Index> rows{7, 7, 7, 7};
  const auto r = segmented_reduce<double>(values, rows);
  EXPECT_TRUE(r.completed.empty());
  EXPECT_EQ(r.carry, (RowPartial<double>{7, {4}}));
}

TEST(SegmentedReduce, EmptyInputAndVectorWidth) {
  const auto none = segmented_reduce<float>(std::vector<float>{}, std::vector<Index>{});
  EXPECT_EQ(none.carry.row, -1);
  EXPECT_TRUE(none.completed.empty());

  const std::vector<double> values{1, 10, 2, 20, 3, 30};
  const std::vector<Index> rows{2, 5, 5};
  const auto r = segmented_reduce<double>(values, rows, 2);
  ASSERT_EQ(r.completed.size(), 1u);
  EXPECT_EQ(r.completed[0], (RowPartial<double>{2, {1, 10}}));
  EXPECT_EQ(r.carry, (RowPartial<double>{5, {5, 50}}));
  EXPECT_THROW(segmented_reduce<double>(values, rows, 3), ArgumentError);
}

TEST(SegmentedReduce, DecreasingRowIdIsContractViolation) {
  const std::vector<float> values{1, 2};
  const std::vector<Index> rows{3, 2};
  EXPECT_THROW(segmented_reduce<float>(values, rows), ContractViolation);
}

TEST(SegmentedReduce, SumsMatchOracleOnRandomRuns) {
  Rng rng(RngSeed{22});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = rng.below(100);
    std::vector<Index> rows(len);
    std::vector<double> values(len);
    Index r = static_cast<Index>(rng.below(3));
    for (std::size_t i = 0; i < len; ++i) {
      r += static_cast<Index>(rng.below(4) == 0 ? 1 + rng.below(3) : 0);
      rows[i] = r;
      values[i] = static_cast<double>(rng.below(16));
    }
    const auto out = segmented_reduce<double>(values, rows);
    std::vector<double> expect(static_cast<std::size_t>(r) + 1, 0.0);
    for (std::size_t i = 0; i < len; ++i) expect[static_cast<std::size_t>(rows[i])] += values[i];
    for (const auto& c : out.completed) ASSERT_EQ(c.values[0], expect[static_cast<std::size_t>(c.row)]);
    if (len > 0) {
      ASSERT_EQ(out.carry.row, rows.back());
      ASSERT_EQ(out.carry.values[0], expect[static_cast<std::size_t>(rows.back())]);
    }
  }
}

TEST(FixCarryout, AddsInBlockOrder) {
  DenseMatrix<float> c(3, 2);
  BlockLimits limits;
  limits.limits = {0, 1, 1, 3};
  limits.items_per_block = 2;
  limits.nnz = 6;
  CarryOut<float> carry(3, 2);
  carry.rows = {1, 1, -1};
  std::copy_n(std::vector<float>{1, 2}.begin(), 2, carry.partial(0).begin());
  std::copy_n(std::vector<float>{10, 20}.begin(), 2, carry.partial(1).begin());
  c(1, 0) = 100;
  fix_carryout(c, limits, carry);
  EXPECT_EQ(c(1, 0), 111.0f);
  EXPECT_EQ(c(1, 1), 22.0f);
  EXPECT_EQ(c(0, 0), 0.0f);
}

TEST(FixCarryout, RejectsRowsOutsideBlock) {
  DenseMatrix<double> c(4, 1);
  BlockLimits limits;
  limits.limits = {0, 1, 4};
  limits.items_per_block = 1;
  limits.nnz = 2;
  CarryOut<double> carry(2, 1);
  carry.rows = {2, -1};
  EXPECT_THROW(fix_carryout(c, limits, carry), ArgumentError);
  carry.rows = {0, 9};
  EXPECT_THROW(fix_carryout(c, limits, carry), ArgumentError);
}

TEST(Merge, IdentityTimesB) {
  const auto b = random_dense<float>(300, 64, Layout::RowMajor, RngSeed{23});
  const auto r = spmm_merge(identity<float>(300), b, serial(), TraceMode::Aggregate);
  EXPECT_EQ(r.c, b);
  // No row crosses a block boundary, so every row is written directly.
  EXPECT_EQ(r.report.counters.writes_c, 300u * 64u);
  EXPECT_EQ(r.report.algorithm, Algorithm::MergeBased);
  EXPECT_DOUBLE_EQ(*r.report.metrics->coalescing_for(AccessKind::ReadB), 1.0);
}

TEST(Merge, GiantRowCarriesOutOfEveryBlock) {
  const std::vector<Index> lens{10000};
  const auto a = gen_row_lengths<double>(lens, 20000, RngSeed{24});
  const auto b = random_dense<double>(20000, 1, Layout::RowMajor, RngSeed{25});
  const auto r = spmm_merge(a, b, serial(), TraceMode::Aggregate);
  // ceil(10000 / 128) blocks. The first 78 end inside row 0 and carry it;
  // the last holds the row's final nonzero and writes it directly.
  EXPECT_EQ(r.trace->work_per_group.size(), 79u);
  EXPECT_EQ(r.report.counters.carryout_accesses, 79u);
  EXPECT_EQ(r.report.counters.partition_overhead_accesses, 79u);
  EXPECT_EQ(r.report.counters.writes_c, 1u);
  EXPECT_LE(max_relative_error(r.c, spmm_reference(a, b)), 1e-12);
}

TEST(Merge, DefaultItemsPerBlockIsBlockSize) {
  const std::vector<Index> lens(10, 100);
  const auto a = gen_row_lengths<float>(lens, 200, RngSeed{26});
  const auto b = random_dense<float>(200, 3, Layout::RowMajor, RngSeed{27});
  const auto r = spmm_merge(a, b, serial(), TraceMode::Aggregate);
  EXPECT_EQ(r.trace->work_per_group.size(), 8u);  // ceil(1000 / 128)
  EXPECT_EQ(r.report.counters.carryout_accesses, 8u * 3u);
  EXPECT_EQ(r.report.counters, r.trace->counters);
}

TEST(Merge, CountersMatchPredictedOverhead) {
  Rng rng(RngSeed{28});
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 1 + static_cast<Index>(rng.below(500));
    const auto lens = oracle::family_row_lengths(oracle::Family::Uniform, rng, m, 300);
    const auto a = gen_row_lengths<float>(lens, 300, RngSeed{rng.next()});
    const Index n = 1 + static_cast<Index>(rng.below(70));
    const auto b = random_dense<float>(300, n, Layout::RowMajor, RngSeed{rng.next()});
    ExecConfig cfg = serial();
    cfg.work_per_thread = 1 + rng.below(4);
    const auto r = spmm_merge(a, b, cfg);
    const auto p = predict_overhead(a, n, cfg, Algorithm::MergeBased);
    EXPECT_EQ(r.report.counters.partition_overhead_accesses, p.partition_overhead_accesses);
    EXPECT_EQ(r.report.counters.carryout_accesses, p.carryout_accesses);
  }
}

TEST(Merge, MatchesReferenceAcrossFamilies) {
  Rng rng(RngSeed{29});
  const oracle::Family families[] = {oracle::Family::Uniform,     oracle::Family::AllEmpty,
                                     oracle::Family::GiantRow,    oracle::Family::FixedLength,
                                     oracle::Family::ManyEmpty,   oracle::Family::PowerLaw};
  for (auto f : families) {
    for (Index n : {1, 8, 32, 33, 64}) {
      const Index m = 1 + static_cast<Index>(rng.below(300));
      const Index k = 1 + static_cast<Index>(rng.below(500));
      const auto lens = oracle::family_row_lengths(f, rng, m, k);
      const auto af = gen_row_lengths<float>(lens, k, RngSeed{rng.next()});
      const auto bf = random_dense<float>(k, n, Layout::RowMajor, RngSeed{rng.next()});
      const auto cf = spmm_merge(af, bf).c;
      EXPECT_LE(max_relative_error(cf, spmm_reference(af, bf)), 1e-5);
      EXPECT_LE(max_relative_error(cf, spmm_rowsplit(af, bf).c), 1e-5);

      const auto ad = gen_row_lengths<double>(lens, k, RngSeed{rng.next()});
      const auto bd = random_dense<double>(k, n, Layout::RowMajor, RngSeed{rng.next()});
      EXPECT_LE(max_relative_error(spmm_merge(ad, bd).c, spmm_reference(ad, bd)), 1e-12);
    }
  }
}

TEST(Merge, ExactWithIntegerValues) {
  // Small integers keep every partial sum exact, so association cannot matter.
  Rng rng(RngSeed{30});
  const auto t = oracle::random_triples<double>(rng, 60, 90, 3000);
  const auto a = build_csr<double>(60, 90, t);
  DenseMatrix<double> b(90, 17);
  for (Index i = 0; i < 90; ++i)
    for (Index j = 0; j < 17; ++j) b(i, j) = static_cast<double>((i * 7 + j) % 5) - 2.0;
  ExecConfig cfg = serial();
  cfg.groups_per_block = 1;
  EXPECT_EQ(spmm_merge(a, b, cfg).c, spmm_reference(a, b));
}

TEST(Merge, ImbalanceBoundedByLastBlock) {
  Rng rng(RngSeed{31});
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 1 + static_cast<Index>(rng.below(2000));
    const auto lens = oracle::family_row_lengths(oracle::Family::PowerLaw, rng, m, 2000);
    const auto a = gen_row_lengths<float>(lens, 2000, RngSeed{rng.next()});
    if (a.nnz() == 0) continue;
    const auto b = random_dense<float>(2000, 2, Layout::RowMajor, RngSeed{rng.next()});
    const auto r = spmm_merge(a, b, serial(), TraceMode::Aggregate);
    const double blocks = static_cast<double>(r.trace->work_per_group.size());
    EXPECT_LE(type1_imbalance(*r.trace), blocks * 128.0 / static_cast<double>(a.nnz()) + 1e-12);
  }
}

TEST(Merge, WideBlocksUseOffsetFallback) {
  // Far more empty rows in one block than the scratch holds.
  std::vector<Index> lens(5000, 0);
  lens.front() = 1;
  lens.back() = 1;
  const auto a = gen_row_lengths<double>(lens, 10, RngSeed{32});
  const auto b = random_dense<double>(10, 4, Layout::RowMajor, RngSeed{33});
  const auto r = spmm_merge(a, b, serial());
  EXPECT_GT(r.report.counters.offset_fallback_reads, 0u);
  EXPECT_EQ(r.c, spmm_reference(a, b));
  const auto dense = gen_row_lengths<double>(std::vector<Index>(100, 3), 10, RngSeed{34});
  EXPECT_EQ(spmm_merge(dense, b, serial()).report.counters.offset_fallback_reads, 0u);
}

TEST(Merge, ErrorsAndEdgeShapes) {
  EXPECT_THROW(spmm_merge(identity<float>(3), DenseMatrix<float>(4, 2)), DimensionError);
  EXPECT_THROW(spmm_merge(identity<float>(3), DenseMatrix<float>(3, 2, Layout::ColMajor)),
               ArgumentError);
  const auto none = build_csr<float>(0, 4, std::vector<CooTriple<float>>{});
  EXPECT_EQ(spmm_merge(none, DenseMatrix<float>(4, 2)).c.num_rows(), 0);
  const auto empty = build_csr<float>(5, 4, std::vector<CooTriple<float>>{});
  const auto r = spmm_merge(empty, random_dense<float>(4, 3, Layout::RowMajor, RngSeed{35}));
  for (float x : r.c.data()) EXPECT_EQ(x, 0.0f);
  EXPECT_EQ(r.report.counters.carryout_accesses, 0u);
}

TEST(Merge, DeterministicAcrossWorkers) {
  Rng rng(RngSeed{36});
  const auto lens = oracle::family_row_lengths(oracle::Family::PowerLaw, rng, 3000, 1000);
  const auto a = gen_row_lengths<float>(lens, 1000, RngSeed{37});
  const auto b = random_dense<float>(1000, 33, Layout::RowMajor, RngSeed{38});
  ExecConfig cfg = serial();
  const auto base = spmm_merge(a, b, cfg).c;
  for (std::size_t w : {2u, 3u, 8u}) {
    cfg.workers = w;
    EXPECT_TRUE(oracle::bit_identical(base, spmm_merge(a, b, cfg).c)) << "workers " << w;
  }
}
