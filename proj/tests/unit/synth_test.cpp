#include "fastcav/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fastcav/baselines.hpp"
#include "fastcav/rng.hpp"
#include "support.hpp"

namespace fastcav {
namespace {

TEST(SampleGaussian, TinySigmaStaysOnMean) {
  const std::vector<double> mu{1.0, -2.0, 3.5};
  EXPECT_CODE(sample_gaussian({mu, Covariance::isotropic(0.0), 3, 1}), ErrorCode::InvalidArgument);
  const auto m = sample_gaussian({mu, Covariance::isotropic(1e-9), 3, 1});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(m(i, j), mu[j], 1e-6);
}

TEST(SampleGaussian, SampleMeanWithinCltBound) {
  const auto m = sample_gaussian({{0.0, 0.0}, Covariance::isotropic(1.0), 10000, 3});
  for (double x : test::naive_column_mean(m)) EXPECT_LE(std::fabs(x), 4.0 / 100.0);
}

TEST(SampleGaussian, SameSeedSameMatrix) {
  const GaussianSpec spec{{0.0, 1.0, 2.0}, Covariance::diagonal({1.0, 4.0, 9.0}), 50, 99};
  EXPECT_EQ(sample_gaussian(spec), sample_gaussian(spec));
  GaussianSpec other = spec;
  other.seed = 100;
  EXPECT_NE(sample_gaussian(spec), sample_gaussian(other));
}

TEST(SampleGaussian, FullCovarianceMatchesTarget) {
  const std::vector<double> sigma{2.0, 0.6, 0.6, 1.0};
  const auto m = sample_gaussian({{0.0, 0.0}, Covariance::full(sigma, 2), 40000, 5});
  const auto e = test::to_eigen(m);
  const Eigen::MatrixXd cov = (e.transpose() * e) / static_cast<double>(m.rows());
  EXPECT_NEAR(cov(0, 0), 2.0, 0.05);
  EXPECT_NEAR(cov(0, 1), 0.6, 0.05);
  EXPECT_NEAR(cov(1, 1), 1.0, 0.05);
}

TEST(Covariance, Errors) {
  EXPECT_CODE(Covariance::diagonal({}), ErrorCode::InvalidArgument);
  EXPECT_CODE(Covariance::diagonal({1.0, -1.0}), ErrorCode::InvalidArgument);
  EXPECT_CODE(Covariance::full({1.0, 2.0, 3.0}, 2), ErrorCode::InvalidArgument);
  EXPECT_CODE(Covariance::full({1.0, 0.5, 0.4, 1.0}, 2), ErrorCode::NotPositiveDefinite);
  EXPECT_CODE(Covariance::full({1.0, 2.0, 2.0, 1.0}, 2), ErrorCode::NotPositiveDefinite);
  EXPECT_CODE(Covariance::diagonal({1.0, 2.0}).check_dim(3), ErrorCode::DimensionMismatch);
  const auto solved = Covariance::diagonal({1.0, 100.0}).solve(std::vector<double>{1.0, 1.0});
  EXPECT_DOUBLE_EQ(solved[1], 0.01);
}

TEST(MakeConceptTask, EqualMeansLeaveNoDirection) {
  const std::vector<double> mu{0.0, 0.0};
  const auto ds = make_concept_task(mu, mu, Covariance::isotropic(1.0), 10000, 4);
  const Cav cav = fit_fastcav(ds);
  EXPECT_LT(cav.meta.weight_norm, 0.1);
}

TEST(MakeConceptTask, OneDimensionalBayesRate) {
  const std::vector<double> mu_c{2.0}, mu_r{0.0};
  const Cav cav = fit_fastcav(make_concept_task(mu_c, mu_r, Covariance::isotropic(1.0), 2000, 12));
  const auto eval = make_concept_task(mu_c, mu_r, Covariance::isotropic(1.0), 2000, 13);
  EXPECT_NEAR(accuracy(cav, eval), test::phi(1.0), 0.03);
}

TEST(EquivalenceReport, IsotropicMethodsAlignWithMeanDifference) {
  TaskParams task;
  task.mu_c = axis_vector(10, 0, 3.0);
  task.mu_r = std::vector<double>(10, 0.0);
  const Method methods[] = {Method::FastCav, Method::Lda, Method::SvmSgd};
  const Table t = equivalence_report(task, methods, 20, 1);
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(t.number(i, "cos_diff_mean"), 0.95) << t.at(i, "method");
    EXPECT_EQ(t.number(i, "failures"), 0.0);
    EXPECT_NEAR(t.number(i, "accuracy_mean"), test::phi(1.5), 0.03);
  }
}

TEST(EquivalenceReport, AnisotropicFavoursLda) {
  TaskParams task;
  task.mu_c = {1.0, 1.0};
  task.mu_r = {0.0, 0.0};
  task.covariance = Covariance::diagonal({1.0, 100.0});
  const Method methods[] = {Method::FastCav, Method::Lda};
  const Table t = equivalence_report(task, methods, 20, 2);
  const double fast = t.number(0, "cos_fisher_mean");
  const double lda = t.number(1, "cos_fisher_mean");
  EXPECT_GE(lda, 0.95);
  EXPECT_GE(lda - fast, 0.1);
}

TEST(EquivalenceReport, NoMethodsGiveEmptyTable) {
  TaskParams task;
  task.mu_c = {1.0};
  task.mu_r = {0.0};
  const Table t = equivalence_report(task, {}, 3, 1);
  EXPECT_TRUE(t.empty());
  EXPECT_FALSE(t.columns().empty());
  EXPECT_CODE(equivalence_report(task, {}, 0, 1), ErrorCode::InvalidArgument);
}

TEST(PlantedGradients, ScoreTracksAlignment) {
  const auto v = axis_vector(20, 3, 1.0);
  Cav cav;
  cav.direction = v;
  EXPECT_GE(tcav_score(cav, planted_gradient_batch(v, 1.0, 1000, 1)), 0.99);
  EXPECT_NEAR(tcav_score(cav, planted_gradient_batch(v, 0.5, 1000, 2)), 0.5, 0.05);
  EXPECT_LE(tcav_score(cav, planted_gradient_batch(v, 0.0, 1000, 3)), 0.01);
  EXPECT_CODE(planted_gradient_batch(v, 1.5, 10, 1), ErrorCode::InvalidArgument);
}

TEST(PlantedGradients, AlignedRowCountIsExact) {
  const auto v = axis_vector(4, 1, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto b = planted_gradient_batch(v, 0.3, 10, seed);
    int aligned = 0;
    for (std::size_t i = 0; i < 10; ++i) aligned += b.grads(i, 1) > 0.0 ? 1 : 0;
    EXPECT_EQ(aligned, 3);
  }
}

TEST(Fixture, WritesManifestAndTensors) {
  test::TempDir dir;
  FixtureParams p;
  p.d = 4;
  p.n_per_set = 30;
  p.n_concepts = 3;
  p.n_random_sets = 2;
  p.layers = {"a", "b"};
  p.dtype = Dtype::Float32;
  const auto m = write_fixture(dir.path(), p);
  EXPECT_EQ(m.concepts.size(), 3u);
  EXPECT_EQ(m.random_sets.size(), 2u);
  EXPECT_EQ(m.layers.size(), 2u);
  const auto c2 = read_tensor(m.concepts[2].path("b"));
  EXPECT_EQ(c2.rows(), 30u);
  EXPECT_GT(test::naive_column_mean(c2)[2], 2.0);
  EXPECT_EQ(read_tensor_header(m.random_sets[1].path("a")).dtype, Dtype::Float32);

  test::TempDir again;
  write_fixture(again.path(), p);
  EXPECT_EQ(test::slurp(m.concepts[0].path("a")), test::slurp(again / "acts/concept0__a.cavk"));
}

TEST(Fixture, EpochScheduleMovesConceptMeans) {
  test::TempDir dir;
  FixtureParams p;
  p.d = 3;
  p.n_per_set = 400;
  p.n_concepts = 2;
  p.n_random_sets = 1;
  p.epochs = 4;
  p.epoch_step = 1.0;
  const auto m = write_fixture(dir.path(), p);
  ASSERT_EQ(m.epochs.size(), 4u);
  for (std::size_t e = 0; e < 4; ++e) {
    const auto mean = test::naive_column_mean(read_tensor(m.concepts[1].path("layer", m.epochs[e])));
    EXPECT_NEAR(mean[1], static_cast<double>(e), 0.2);
  }
}

TEST(Fixture, PlantedGradientFiles) {
  test::TempDir dir;
  FixtureParams p;
  p.d = 5;
  p.layers = {"x", "y"};
  write_planted_gradients(dir.path(), p, "cls", 1.0, 50, 3);
  const auto g = read_tensor(dir / "cls/y.cavk");
  EXPECT_EQ(g.rows(), 50u);
  EXPECT_EQ(g.cols(), 5u);
  for (std::size_t i = 0; i < g.rows(); ++i) EXPECT_GT(g(i, 0), 0.0);
}

TEST(SupportVectorStudy, ReportsRatiosAndResolution) {
  SupportVectorStudyParams p;
  p.dims = {16, 1024};
  p.epochs = 40000;
  const Table t = support_vector_study(p);
  ASSERT_EQ(t.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const double pooled = t.number(i, "ratio");
    EXPECT_NEAR(pooled, (t.number(i, "concept_ratio") + t.number(i, "random_ratio")) / 2.0, 1e-12);
    EXPECT_EQ(t.number(i, "epochs"), 40000.0);
    EXPECT_NEAR(t.number(i, "margin_resolution"), 1.0 / std::sqrt(40000.0 * 100.0), 1e-9);
  }
  // Higher dimension, same data law: more rows end up on or inside the margin.
  EXPECT_GE(t.number(1, "ratio"), t.number(0, "ratio"));
}

}  // namespace
}  // namespace fastcav
