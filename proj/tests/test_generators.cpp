#include <gtest/gtest.h>

#include <set>

#include "spmm/error.hpp"
#include "spmm/generators.hpp"

using namespace spmm;

TEST(GenAspect, ShapeArithmetic) {
  const auto wide = gen_aspect_matrix<float>(8, 2);
  EXPECT_EQ(wide.num_rows(), 2);
  EXPECT_EQ(wide.num_cols(), 4);
  for (Index r = 0; r < 2; ++r) EXPECT_EQ(wide.row_length(r), 4);

  const auto tall = gen_aspect_matrix<float>(8, 4);
  EXPECT_EQ(tall.num_rows(), 4);
  EXPECT_EQ(tall.num_cols(), 2);
  for (Index r = 0; r < 4; ++r) EXPECT_EQ(tall.row_length(r), 2);
}

TEST(GenAspect, RowsAreDenseAndValuesRowConstant) {
  const auto a = gen_aspect_matrix<double>(96, 12);
  for (Index r = 0; r < a.num_rows(); ++r) {
    for (Index p = a.row_begin(r); p < a.row_end(r); ++p) {
      EXPECT_EQ(a.col_indices()[static_cast<std::size_t>(p)], p - a.row_begin(r));
      EXPECT_EQ(a.values()[static_cast<std::size_t>(p)], a.values()[static_cast<std::size_t>(a.row_begin(r))]);
    }
  }
  EXPECT_EQ(gen_aspect_matrix<double>(96, 12), a);
}

TEST(GenAspect, DeskScaleSweepShapes) {
  const Index total = Index{1} << 20;
  for (Index rows = 2; rows <= (Index{1} << 19); rows *= 8) {
    const auto a = gen_aspect_matrix<float>(total, rows);
    EXPECT_EQ(a.nnz(), total);
    EXPECT_EQ(a.num_cols(), total / rows);
  }
}

TEST(GenAspect, RejectsNonDivisible) {
  EXPECT_THROW(gen_aspect_matrix<float>(10, 3), ArgumentError);
  EXPECT_THROW(gen_aspect_matrix<float>(10, 0), ArgumentError);
}

TEST(GenUniform, PerRowCountForced) {
  const auto a = gen_uniform_random<float>(4, 10, 0.5, RngSeed{1});
  for (Index r = 0; r < 4; ++r) EXPECT_EQ(a.row_length(r), 5);
}

TEST(GenUniform, ZeroFillIsEmpty) {
  EXPECT_EQ(gen_uniform_random<float>(100, 100, 0.0, RngSeed{1}).nnz(), 0);
}

TEST(GenUniform, CrossoverScaleMatrix) {
  const auto a = gen_uniform_random<float>(1000, 1000, 0.09, RngSeed{9});
  for (Index r = 0; r < a.num_rows(); ++r) ASSERT_EQ(a.row_length(r), 90);
}

TEST(GenUniform, PropertiesAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng pick(RngSeed{seed + 100});
    const Index rows = 1 + static_cast<Index>(pick.below(30));
    const Index cols = 1 + static_cast<Index>(pick.below(60));
    const double fill = pick.unit();
    const auto a = gen_uniform_random<double>(rows, cols, fill, RngSeed{seed});
    const auto expected = static_cast<Index>(std::llround(fill * static_cast<double>(cols)));
    for (Index r = 0; r < rows; ++r) {
      ASSERT_EQ(a.row_length(r), expected);
      std::set<Index> distinct;
      for (Index p = a.row_begin(r); p < a.row_end(r); ++p) {
        distinct.insert(a.col_indices()[static_cast<std::size_t>(p)]);
        const double v = a.values()[static_cast<std::size_t>(p)];
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      ASSERT_EQ(static_cast<Index>(distinct.size()), expected);
    }
    EXPECT_EQ(gen_uniform_random<double>(rows, cols, fill, RngSeed{seed}), a);
  }
}

TEST(GenUniform, RejectsBadFraction) {
  EXPECT_THROW(gen_uniform_random<float>(2, 2, 1.5, RngSeed{0}), ArgumentError);
  EXPECT_THROW(gen_uniform_random<float>(2, 2, -0.1, RngSeed{0}), ArgumentError);
}

TEST(GenRowLengths, ExactLengths) {
  const std::vector<Index> lens{0, 1, 31, 32, 33, 0, 64};
  const auto a = gen_row_lengths<float>(lens, 64, RngSeed{2});
  for (std::size_t r = 0; r < lens.size(); ++r) EXPECT_EQ(a.row_length(static_cast<Index>(r)), lens[r]);
  EXPECT_THROW(gen_row_lengths<float>(std::vector<Index>{65}, 64, RngSeed{2}), ArgumentError);
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(RngSeed{7});
  for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.below(3), 3u);
  EXPECT_THROW(rng.below(0), ArgumentError);
}
