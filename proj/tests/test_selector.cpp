#include <gtest/gtest.h>

#include <cmath>

#include "spmm/generators.hpp"
#include "spmm/reference.hpp"
#include "spmm/selector.hpp"

using namespace spmm;

TEST(Selector, ThresholdBoundary) {
  EXPECT_EQ(choose_algorithm(1.0), Algorithm::MergeBased);
  EXPECT_EQ(choose_algorithm(9.34), Algorithm::MergeBased);
  EXPECT_EQ(choose_algorithm(9.35), Algorithm::RowSplit);
  EXPECT_EQ(choose_algorithm(std::nextafter(9.35, 0.0)), Algorithm::MergeBased);
  EXPECT_EQ(choose_algorithm(500.0), Algorithm::RowSplit);
  EXPECT_EQ(choose_algorithm(0.0), Algorithm::MergeBased);
}

TEST(Selector, CustomThresholdAndValidation) {
  EXPECT_EQ(choose_algorithm(20.0, HeuristicConfig{32.0}), Algorithm::MergeBased);
  EXPECT_EQ(choose_algorithm(2.0, HeuristicConfig{1.5}), Algorithm::RowSplit);
  EXPECT_THROW(choose_algorithm(-1.0), ArgumentError);
  EXPECT_THROW(choose_algorithm(1.0, HeuristicConfig{0.0}), ArgumentError);
  EXPECT_THROW(choose_algorithm(1.0, HeuristicConfig{NAN}), ArgumentError);
}

TEST(Selector, MeanRowLength) {
  EXPECT_DOUBLE_EQ(mean_row_length(identity<float>(10)), 1.0);
  const std::vector<Index> lens{0, 3, 8};
  EXPECT_DOUBLE_EQ(mean_row_length(gen_row_lengths<double>(lens, 10, RngSeed{1})), 11.0 / 3.0);
  const auto none = build_csr<float>(0, 3, std::vector<CooTriple<float>>{});
  EXPECT_THROW(mean_row_length(none), ArgumentError);
}

TEST(Selector, AutoDispatchesByRowLength) {
  const auto b = random_dense<float>(64, 16, Layout::RowMajor, RngSeed{2});
  const auto sparse = identity<float>(64);
  const auto r1 = spmm_auto(sparse, b);
  EXPECT_EQ(r1.report.algorithm, Algorithm::MergeBased);
  EXPECT_EQ(r1.c, b);

  const auto dense = gen_row_lengths<float>(std::vector<Index>(20, 40), 64, RngSeed{3});
  const auto r2 = spmm_auto(dense, b);
  EXPECT_EQ(r2.report.algorithm, Algorithm::RowSplit);
  EXPECT_LE(max_relative_error(r2.c, spmm_reference(dense, b)), 1e-5);

  AutoConfig cfg;
  cfg.heuristic.threshold = 100.0;
  EXPECT_EQ(spmm_auto(dense, b, cfg).report.algorithm, Algorithm::MergeBased);

  const auto none = build_csr<float>(0, 64, std::vector<CooTriple<float>>{});
  EXPECT_EQ(spmm_auto(none, b).report.algorithm, Algorithm::MergeBased);
}

TEST(Selector, AutoPassesTraceMode) {
  const auto b = random_dense<double>(8, 4, Layout::RowMajor, RngSeed{4});
  const auto r = spmm_auto(identity<double>(8), b, {}, TraceMode::Aggregate);
  ASSERT_TRUE(r.trace);
  EXPECT_TRUE(r.report.metrics);
}

TEST(Algorithm, Names) {
  EXPECT_EQ(parse_algorithm("rowsplit"), Algorithm::RowSplit);
  EXPECT_EQ(parse_algorithm("merge"), Algorithm::MergeBased);
  EXPECT_EQ(parse_algorithm("MergeBased"), Algorithm::MergeBased);
  EXPECT_EQ(parse_algorithm("gemm"), Algorithm::DenseGemm);
  EXPECT_FALSE(parse_algorithm("fast"));
  EXPECT_STREQ(to_string(Algorithm::RowSplit), "RowSplit");
}
