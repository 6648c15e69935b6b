#include "fastcav/numeric.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace fastcav {
namespace {

TEST(Numeric, PairwiseSumIsExactOnIntegers) {
  std::vector<double> x(10007);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(x), 10006.0 * 10007.0 / 2.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(Numeric, PairwiseSumBeatsNaiveAccumulation) {
  const std::vector<double> x(1 << 22, 0.1);
  const long double exact = 0.1L * static_cast<long double>(x.size());
  double naive = 0.0;
  for (double v : x) naive += v;
  const double pw = pairwise_sum(x);
  EXPECT_LT(std::fabs(pw - static_cast<double>(exact)), std::fabs(naive - static_cast<double>(exact)));
  EXPECT_LT(std::fabs(pw - static_cast<double>(exact)) / static_cast<double>(exact), 1e-14);
}

TEST(Numeric, DotNormCosine) {
  const std::vector<double> a{3, 4, 0}, b{4, -3, 0};
  EXPECT_EQ(dot(a, b), 0.0);
  EXPECT_EQ(norm2(a), 5.0);
  EXPECT_EQ(cosine(a, b), 0.0);
  EXPECT_EQ(cosine(a, std::vector<double>(3, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(cosine(a, a), 1.0);
  std::vector<double> y{1, 1, 1};
  axpy(2.0, a, y);
  EXPECT_EQ(y, (std::vector<double>{7, 9, 1}));
  scale(0.5, y);
  EXPECT_EQ(y, (std::vector<double>{3.5, 4.5, 0.5}));
}

TEST(Numeric, ColumnSumsMatchOracleAcrossTileBoundaries) {
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{1, 1}, {7, 3}, {8, 2049}, {9, 4097}, {100, 5000}, {33, 2048}}) {
    const auto m = test::random_matrix(n, d, n * 31 + d, -100.0, 100.0);
    const auto means = column_means(m);
    const auto oracle = test::naive_column_mean(m);
    for (std::size_t j = 0; j < d; ++j) ASSERT_NEAR(means[j], oracle[j], 1e-12 * 100.0) << n << "x" << d << " col " << j;
  }
}

TEST(Numeric, ColumnSumsIndependentOfThreads) {
  const auto m = test::random_matrix(50, 9000, 5);
  const auto one = column_sums(m, 1);
  for (unsigned t : {2u, 3u, 8u, 64u}) EXPECT_EQ(column_sums(m, t), one);
}

TEST(Numeric, SummaryAndVariance) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize(x);
  EXPECT_EQ(s.mean, 5.0);
  EXPECT_EQ(s.std, 2.0);
  EXPECT_EQ(s.min, 2.0);
  EXPECT_EQ(s.max, 9.0);
  EXPECT_EQ(s.count, 8u);
  EXPECT_DOUBLE_EQ(sample_variance(x), 32.0 / 7.0);
  EXPECT_EQ(sample_variance(std::vector<double>{1.0}), 0.0);
  EXPECT_EQ(summarize({}).count, 0u);
}

TEST(Matrix, ConstructionAndSlicing) {
  EXPECT_CODE(ActivationMatrix(2, 2, {1.0, 2.0, 3.0}), ErrorCode::ShapeMismatch);
  const auto m = ActivationMatrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(m.slice_rows(1, 3), ActivationMatrix::from_rows({{3, 4}, {5, 6}}));
  const std::size_t idx[] = {2, 0};
  EXPECT_EQ(m.gather_rows(idx), ActivationMatrix::from_rows({{5, 6}, {1, 2}}));
  EXPECT_EQ(stack_rows(m.slice_rows(0, 1), m.slice_rows(2, 3)), ActivationMatrix::from_rows({{1, 2}, {5, 6}}));
}

}  // namespace
}  // namespace fastcav
