#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "spmm/generators.hpp"
#include "spmm/reference.hpp"
#include "spmm/rowsplit.hpp"
#include "support/oracles.hpp"

using namespace spmm;

namespace {

template <typename T>
double error_vs_oracle(const CsrMatrix<T>& a, const DenseMatrix<T>& b, const DenseMatrix<T>& c) {
  // Accumulate A * B in double straight from the triples.
  const auto triples = to_triples(a);
  std::vector<double> expect(static_cast<std::size_t>(a.num_rows() * b.num_cols()), 0.0);
  for (const auto& t : triples)
    for (Index j = 0; j < b.num_cols(); ++j)
      expect[static_cast<std::size_t>(t.row * b.num_cols() + j)] +=
          static_cast<double>(t.value) * static_cast<double>(b(t.col, j));
  double err = 0.0;
  for (Index i = 0; i < c.num_rows(); ++i)
    for (Index j = 0; j < c.num_cols(); ++j) {
      const double y = expect[static_cast<std::size_t>(i * c.num_cols() + j)];
      err = std::max(err, std::abs(static_cast<double>(c(i, j)) - y) / std::max(std::abs(y), 1.0));
    }
  return err;
}

RowSplitParams serial() {
  RowSplitParams p;
  p.cfg.workers = 1;
  return p;
}

}  // namespace

TEST(RowSplit, IdentityTimesWideB) {
  const auto b = random_dense<float>(4, 32, Layout::RowMajor, RngSeed{1});
  const auto r = spmm_rowsplit(identity<float>(4), b, serial(), TraceMode::Full);
  EXPECT_EQ(r.c, b);
  ASSERT_TRUE(r.trace);
  EXPECT_DOUBLE_EQ(coalescing_efficiency(*r.trace, AccessKind::ReadB), 1.0);
  EXPECT_DOUBLE_EQ(type2_utilization(*r.trace, AccessKind::ReadA), 1.0 / 32.0);
  EXPECT_EQ(r.report.algorithm, Algorithm::RowSplit);
  EXPECT_EQ(r.report.counters.writes_c, 128u);
}

TEST(RowSplit, FullChunksUseEveryLane) {
  const std::vector<Index> lens{64};
  const auto a = gen_row_lengths<float>(lens, 100, RngSeed{2});
  const auto b = random_dense<float>(100, 32, Layout::RowMajor, RngSeed{3});
  const auto r = spmm_rowsplit(a, b, serial(), TraceMode::Aggregate);
  EXPECT_EQ(r.report.counters.broadcast_rounds, 64u);
  EXPECT_DOUBLE_EQ(type2_utilization(*r.trace, AccessKind::ReadB), 1.0);
  EXPECT_DOUBLE_EQ(type2_utilization(*r.trace, AccessKind::ReadA), 1.0);
}

TEST(RowSplit, RowOfThirtyThreeHalfFillsSecondChunk) {
  const std::vector<Index> lens{33, 33, 33};
  const auto a = gen_row_lengths<double>(lens, 50, RngSeed{4});
  const auto b = random_dense<double>(50, 32, Layout::RowMajor, RngSeed{5});
  const auto r = spmm_rowsplit(a, b, serial(), TraceMode::Aggregate);
  EXPECT_NEAR(type2_utilization(*r.trace, AccessKind::ReadB), 33.0 / 64.0, 1e-12);
  EXPECT_EQ(r.report.counters.broadcast_rounds, 3u * 64u);
  // Dummy rounds still load B.
  EXPECT_EQ(r.report.counters.reads_b, 3u * 64u * 32u);
  EXPECT_EQ(r.report.counters.reads_a, 99u);
}

TEST(RowSplit, WorkPerGroupIsRowLength) {
  const std::vector<Index> lens{0, 5, 97, 1, 1, 0, 40};
  const auto a = gen_row_lengths<float>(lens, 128, RngSeed{6});
  const auto b = random_dense<float>(128, 8, Layout::RowMajor, RngSeed{7});
  const auto r = spmm_rowsplit(a, b, serial(), TraceMode::Aggregate);
  ASSERT_EQ(r.trace->work_per_group.size(), lens.size());
  for (std::size_t i = 0; i < lens.size(); ++i)
    EXPECT_EQ(r.trace->work_per_group[i], static_cast<std::uint64_t>(lens[i]));
  const double mean = std::accumulate(lens.begin(), lens.end(), 0.0) / static_cast<double>(lens.size());
  EXPECT_NEAR(type1_imbalance(*r.trace), 97.0 / mean, 1e-12);
  EXPECT_NEAR(r.report.metrics->type1, 97.0 / mean, 1e-12);
}

TEST(RowSplit, MatchesOracleAcrossFamilies) {
  Rng rng(RngSeed{8});
  const oracle::Family families[] = {oracle::Family::Uniform,     oracle::Family::AllEmpty,
                                     oracle::Family::GiantRow,    oracle::Family::FixedLength,
                                     oracle::Family::ManyEmpty,   oracle::Family::PowerLaw};
  for (auto f : families) {
    for (Index n : {1, 8, 32, 33, 64}) {
      const Index m = 1 + static_cast<Index>(rng.below(200));
      const Index k = 1 + static_cast<Index>(rng.below(400));
      const auto lens = oracle::family_row_lengths(f, rng, m, k);
      const auto af = gen_row_lengths<float>(lens, k, RngSeed{rng.next()});
      const auto bf = random_dense<float>(k, n, Layout::RowMajor, RngSeed{rng.next()});
      const auto cf = spmm_rowsplit(af, bf).c;
      EXPECT_LE(error_vs_oracle(af, bf, cf), 1e-5);
      EXPECT_EQ(cf, spmm_reference(af, bf));

      const auto ad = gen_row_lengths<double>(lens, k, RngSeed{rng.next()});
      const auto bd = random_dense<double>(k, n, Layout::RowMajor, RngSeed{rng.next()});
      EXPECT_LE(error_vs_oracle(ad, bd, spmm_rowsplit(ad, bd).c), 1e-12);
    }
  }
}

TEST(RowSplit, EmptyRowsGiveZeroRows) {
  const std::vector<Index> lens{0, 3, 0, 0, 2};
  const auto a = gen_row_lengths<float>(lens, 10, RngSeed{9});
  const auto b = random_dense<float>(10, 40, Layout::RowMajor, RngSeed{10});
  const auto c = spmm_rowsplit(a, b).c;
  for (Index r : {0, 2, 3})
    for (Index j = 0; j < 40; ++j) EXPECT_EQ(c(r, j), 0.0f);
}

TEST(RowSplit, PartialTilesAndCustomTileWidth) {
  const std::vector<Index> lens{7, 40, 0, 12};
  const auto a = gen_row_lengths<double>(lens, 60, RngSeed{11});
  const auto b = random_dense<double>(60, 45, Layout::RowMajor, RngSeed{12});
  const auto ref = spmm_reference(a, b);
  for (std::size_t tile : {0u, 1u, 5u, 16u, 32u}) {
    RowSplitParams p = serial();
    p.column_tile = tile;
    const auto r = spmm_rowsplit(a, b, p, TraceMode::Aggregate);
    EXPECT_EQ(r.c, ref) << "tile " << tile;
    const std::size_t t = tile == 0 ? 32 : tile;
    const std::uint64_t tiles = (45 + t - 1) / t;
    // A is rescanned once per tile.
    EXPECT_EQ(r.report.counters.reads_a, tiles * 59u);
    EXPECT_EQ(r.report.counters.writes_c, 4u * 45u);
  }
  RowSplitParams wide = serial();
  wide.column_tile = 33;
  EXPECT_THROW(spmm_rowsplit(a, b, wide), ArgumentError);
}

TEST(RowSplit, ColumnMajorBOnlyWhenInstrumented) {
  const std::vector<Index> lens{40, 40};
  const auto a = gen_row_lengths<float>(lens, 64, RngSeed{13});
  const auto b = random_dense<float>(64, 32, Layout::ColMajor, RngSeed{14});
  EXPECT_THROW(spmm_rowsplit(a, b), ArgumentError);
  const auto r = spmm_rowsplit(a, b, serial(), TraceMode::Aggregate);
  EXPECT_EQ(r.c, spmm_reference(a, b));
  EXPECT_LE(coalescing_efficiency(*r.trace, AccessKind::ReadB), 1.0 / 16.0);
  const auto rm = spmm_rowsplit(a, b.with_layout(Layout::RowMajor), serial(), TraceMode::Aggregate);
  EXPECT_DOUBLE_EQ(coalescing_efficiency(*rm.trace, AccessKind::ReadB), 1.0);
}

TEST(RowSplit, DimensionMismatch) {
  EXPECT_THROW(spmm_rowsplit(identity<float>(4), DenseMatrix<float>(5, 2)), DimensionError);
}

TEST(RowSplit, ZeroRowsAndZeroColumns) {
  const auto a = build_csr<float>(0, 5, std::vector<CooTriple<float>>{});
  EXPECT_EQ(spmm_rowsplit(a, DenseMatrix<float>(5, 3)).c.num_rows(), 0);
  const auto c = spmm_rowsplit(identity<float>(3), DenseMatrix<float>(3, 0)).c;
  EXPECT_EQ(c.num_cols(), 0);
}

TEST(RowSplit, OtherLaneWidths) {
  const std::vector<Index> lens{9, 17, 3, 0, 25};
  const auto a = gen_row_lengths<double>(lens, 30, RngSeed{15});
  const auto b = random_dense<double>(30, 20, Layout::RowMajor, RngSeed{16});
  for (std::size_t w : {1u, 4u, 8u, 64u}) {
    RowSplitParams p = serial();
    p.cfg.lane_width = w;
    const auto r = spmm_rowsplit(a, b, p, TraceMode::Aggregate);
    EXPECT_EQ(r.c, spmm_reference(a, b)) << "width " << w;
    EXPECT_EQ(r.trace->lane_width, w);
  }
}

TEST(RowSplit, MetricsInReportOnlyWhenInstrumented) {
  const auto a = identity<float>(8);
  const auto b = random_dense<float>(8, 4, Layout::RowMajor, RngSeed{17});
  EXPECT_FALSE(spmm_rowsplit(a, b).report.metrics);
  EXPECT_FALSE(spmm_rowsplit(a, b).trace);
  EXPECT_TRUE(spmm_rowsplit(a, b, serial(), TraceMode::Aggregate).report.metrics);
  EXPECT_EQ(spmm_rowsplit(a, b).report.registers_per_lane, 64u);
}
