#include "fastcav/cav.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fastcav/baselines.hpp"
#include "fastcav/rng.hpp"
#include "fastcav/synth.hpp"
#include "support.hpp"

namespace fastcav {
namespace {

using M = ActivationMatrix;

Cav make_cav(std::vector<double> v, double b) {
  Cav c;
  c.direction = std::move(v);
  c.intercept = b;
  return c;
}

ConceptDataset gaussian_task(std::uint64_t seed, std::size_t n = 500) {
  const std::vector<double> mu_c{3.0, 0.0}, mu_r{0.0, 0.0};
  return make_concept_task(mu_c, mu_r, Covariance::isotropic(1.0), n, seed);
}

TEST(GlobalMean, SinglePoints) {
  const ConceptDataset ds(M::from_rows({{2, 0}}), M::from_rows({{0, 0}}));
  EXPECT_EQ(global_mean(ds), (std::vector<double>{1, 0}));
  const ConceptDataset same(M::from_rows({{-4.5}}), M::from_rows({{-4.5}}));
  EXPECT_EQ(global_mean(same), (std::vector<double>{-4.5}));
}

TEST(GlobalMean, SampleOfTwoGaussians) {
  const auto ds = gaussian_task(7);
  const auto mu = global_mean(ds);
  const auto oracle = test::naive_pooled_mean(ds.concept_acts(), ds.random_acts());
  const double tol = 3.0 / std::sqrt(1000.0);
  EXPECT_NEAR(mu[0], 1.5, tol);
  EXPECT_NEAR(mu[1], 0.0, tol);
  EXPECT_NEAR(mu[0], oracle[0], 1e-13);
  EXPECT_NEAR(mu[1], oracle[1], 1e-13);
}

TEST(FitFastCav, SinglePoints) {
  const ConceptDataset ds(M::from_rows({{2, 0}}), M::from_rows({{0, 0}}));
  const Cav cav = fit_fastcav(ds);
  EXPECT_EQ(cav.direction, (std::vector<double>{1, 0}));
  EXPECT_EQ(cav.intercept, -1.0);
  const double a[] = {2, 0}, b[] = {0, 0};
  EXPECT_EQ(score(cav, a), 1.0);
  EXPECT_EQ(score(cav, b), -1.0);
  EXPECT_EQ(cav.method, Method::FastCav);
}

TEST(FitFastCav, SymmetricSquare) {
  const ConceptDataset ds(M::from_rows({{1, 1}, {-1, 1}}), M::from_rows({{1, -1}, {-1, -1}}));
  const Cav cav = fit_fastcav(ds);
  EXPECT_EQ(global_mean(ds), (std::vector<double>{0, 0}));
  EXPECT_EQ(cav.direction, (std::vector<double>{0, 1}));
  EXPECT_EQ(cav.intercept, 0.0);
}

TEST(FitFastCav, GaussianDirectionMatchesSampleMeanOracle) {
  const auto ds = gaussian_task(7);
  const Cav cav = fit_fastcav(ds);
  EXPECT_GE(test::naive_cos(cav.direction, {1.0, 0.0}), 0.99);

  auto mc = test::naive_column_mean(ds.concept_acts());
  const auto mr = test::naive_column_mean(ds.random_acts());
  for (std::size_t j = 0; j < mc.size(); ++j) mc[j] = (mc[j] - mr[j]) / 2.0;
  const auto oracle = test::normalized(mc);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(cav.direction[j], oracle[j], 1e-12);
}

TEST(FitFastCav, IdenticalSetsGiveZeroDirection) {
  const auto m = test::random_matrix(5, 3, 1);
  EXPECT_CODE(fit_fastcav(ConceptDataset(m, m)), ErrorCode::ZeroDirection);
}

TEST(FitFastCav, WidthMismatch) {
  EXPECT_CODE(ConceptDataset(M(2, 3), M(2, 4)), ErrorCode::DimensionMismatch);
}

TEST(FitFastCav, UnequalSetSizesWarn) {
  const ConceptDataset ds(M::from_rows({{2, 0}, {2, 1}}), M::from_rows({{0, 0}}));
  EXPECT_EQ(fit_fastcav(ds).meta.warnings.size(), 1u);
}

TEST(Score, Examples) {
  const double x1[] = {2, 0}, x2[] = {5, 0};
  EXPECT_EQ(score(make_cav({1, 0}, -1), x1), 1.0);
  EXPECT_EQ(score(make_cav({0, 1}, 0), x2), 0.0);
  const double x3[] = {1, 2, 3};
  EXPECT_CODE(score(make_cav({1, 0}, 0), x3), ErrorCode::DimensionMismatch);
}

TEST(Score, BoundaryPointScoresZero) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(7);
    for (double& x : v) x = rng.normal();
    v = test::normalized(v);
    const double b = 10.0 * rng.normal();
    std::vector<double> x(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) x[j] = -b * v[j];
    EXPECT_NEAR(score(make_cav(v, b), x), 0.0, 1e-12 * (1 + std::fabs(b)));
  }
}

TEST(Accuracy, SeparatedAndSwapped) {
  const ConceptDataset ds(M::from_rows({{2, 0}}), M::from_rows({{0, 0}}));
  const Cav cav = fit_fastcav(ds);
  EXPECT_EQ(accuracy(cav, ds), 1.0);
  EXPECT_EQ(accuracy(cav, ds.swapped()), 0.0);
}

TEST(Accuracy, BoundaryCountsAsRandom) {
  const Cav cav = make_cav({1, 0}, 0);
  const ConceptDataset on_line(M::from_rows({{0, 5}}), M::from_rows({{0, -5}}));
  EXPECT_EQ(accuracy(cav, on_line), 0.5);
}

TEST(Accuracy, HeldOutMatchesBayesRate) {
  const Cav cav = fit_fastcav(gaussian_task(7));
  const auto eval = gaussian_task(11, 200);
  EXPECT_NEAR(accuracy(cav, eval), test::phi(1.5), 0.03);
}

TEST(Cosine, Examples) {
  const Cav a = make_cav({0.6, 0.8}, 1);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
  EXPECT_EQ(cosine_similarity(make_cav({1, 0}, 0), make_cav({0, 1}, 0)), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, make_cav({-0.6, -0.8}, 0)), -1.0);
  EXPECT_CODE(cosine_similarity(a, make_cav({1}, 0)), ErrorCode::DimensionMismatch);
}

TEST(PairwiseSimilarity, Examples) {
  const Cav a = make_cav({0.6, 0.8}, 0);
  const std::vector<Cav> three{a, a, a};
  const auto s = pairwise_similarity(three);
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_NEAR(s.std, 0.0, 1e-15);
  EXPECT_EQ(s.pairs, 3u);

  const std::vector<Cav> axes{make_cav({1, 0}, 0), make_cav({0, 1}, 0)};
  EXPECT_EQ(pairwise_similarity(axes).mean, 0.0);
  EXPECT_CODE(pairwise_similarity(std::span<const Cav>(axes.data(), 1)), ErrorCode::InvalidArgument);
}

TEST(PairwiseSimilarity, FastCavMoreStableThanSvmUnderRandomResampling) {
  const std::size_t d = 50, n = 60;
  const auto mu_c = axis_vector(d, 0, 3.0);
  const std::vector<double> mu_r(d, 0.0);
  const auto concept_acts = sample_gaussian({mu_c, Covariance::isotropic(1.0), n, 100});
  std::vector<Cav> fast, svm;
  for (std::uint64_t r = 0; r < 30; ++r) {
    const ConceptDataset ds(concept_acts, sample_gaussian({mu_r, Covariance::isotropic(1.0), n, 200 + r}));
    fast.push_back(fit_fastcav(ds));
    SgdConfig cfg;
    cfg.shuffle_seed = r;
    svm.push_back(fit_svm_sgd(ds, cfg));
  }
  EXPECT_GT(pairwise_similarity(fast).mean, pairwise_similarity(svm).mean);
}

TEST(SplitRows, PartitionsRowsDeterministically) {
  const auto m = test::random_matrix(30, 2, 4);
  const auto s = split_rows(m, 1.0 / 3.0, 9);
  ASSERT_TRUE(s.split);
  EXPECT_EQ(s.eval.rows(), 10u);
  EXPECT_EQ(s.train.rows(), 20u);
  std::multiset<double> all, parts;
  for (std::size_t i = 0; i < m.rows(); ++i) all.insert(m(i, 0));
  for (std::size_t i = 0; i < s.eval.rows(); ++i) parts.insert(s.eval(i, 0));
  for (std::size_t i = 0; i < s.train.rows(); ++i) parts.insert(s.train(i, 0));
  EXPECT_EQ(all, parts);
  EXPECT_EQ(split_rows(m, 1.0 / 3.0, 9).eval, s.eval);
  EXPECT_NE(split_rows(m, 1.0 / 3.0, 10).eval, s.eval);
}

TEST(SplitRows, TinyMatricesAreNotSplit) {
  const auto m = test::random_matrix(2, 2, 4);
  const auto s = split_rows(m, 0.5, 1);
  EXPECT_FALSE(s.split);
  EXPECT_EQ(s.train, m);
  EXPECT_CODE(split_rows(m, 0.0, 1), ErrorCode::InvalidArgument);
  EXPECT_CODE(split_rows(m, 1.0, 1), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace fastcav
