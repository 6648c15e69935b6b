#include "fastcav/baselines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fastcav/fit.hpp"
#include "fastcav/synth.hpp"
#include "support.hpp"

namespace fastcav {
namespace {

using M = ActivationMatrix;

ConceptDataset separable_pair() { return ConceptDataset(M::from_rows({{2, 0}}), M::from_rows({{-2, 0}})); }

ConceptDataset gaussian_task(std::uint64_t seed) {
  const std::vector<double> mu_c{3.0, 0.0}, mu_r{0.0, 0.0};
  return make_concept_task(mu_c, mu_r, Covariance::isotropic(1.0), 500, seed);
}

// Points mu +- a e_j for every axis j, giving a within-class scatter of
// 2 a_j^2 on axis j per class.
M cross(const std::vector<double>& mu, const std::vector<double>& a) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    for (double s : {1.0, -1.0}) {
      auto r = mu;
      r[j] += s * a[j];
      rows.push_back(r);
    }
  }
  return M::from_rows(rows);
}

TEST(SgdConfig, Validation) {
  SgdConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = [&](auto mutate) {
    SgdConfig c;
    mutate(c);
    EXPECT_CODE(c.validate(), ErrorCode::InvalidArgument);
  };
  bad([](SgdConfig& c) { c.max_epochs = 0; });
  bad([](SgdConfig& c) { c.schedule.eta0 = 0.0; });
  bad([](SgdConfig& c) { c.schedule.power = -1.0; });
  bad([](SgdConfig& c) { c.lambda = -1.0; });
  bad([](SgdConfig& c) { c.tolerance = -1.0; });
  bad([](SgdConfig& c) { c.patience = 0; });
}

TEST(LearningRate, Schedules) {
  LearningRate inv;
  EXPECT_DOUBLE_EQ(inv.at(1), 0.01);
  EXPECT_DOUBLE_EQ(inv.at(4), 0.005);
  LearningRate constant{LearningRate::Kind::Constant, 0.2, 0.5};
  EXPECT_DOUBLE_EQ(constant.at(1000), 0.2);
}

TEST(SvmSgd, SeparablePair) {
  const auto ds = separable_pair();
  const Cav cav = fit_svm_sgd(ds);
  EXPECT_EQ(accuracy(cav, ds), 1.0);
  EXPECT_GE(test::naive_cos(cav.direction, {1, 0}), 0.999);
  EXPECT_EQ(cav.method, Method::SvmSgd);
}

TEST(SvmSgd, AgreesWithFastCavOnIsotropicTask) {
  const auto ds = gaussian_task(7);
  const Cav svm = fit_svm_sgd(ds);
  const Cav fast = fit_fastcav(ds);
  EXPECT_GE(cosine_similarity(svm, fast), 0.9);
  auto delta = test::naive_column_mean(ds.concept_acts());
  const auto mr = test::naive_column_mean(ds.random_acts());
  for (std::size_t j = 0; j < delta.size(); ++j) delta[j] -= mr[j];
  EXPECT_GE(test::naive_cos(svm.direction, delta), 0.9);
  EXPECT_GE(test::naive_cos(fast.direction, delta), 0.99);
}

TEST(SvmSgd, LossDecreasesAndIsRecorded) {
  const auto ds = gaussian_task(3);
  SgdConfig cfg;
  cfg.max_epochs = 50;
  const Cav cav = fit_svm_sgd(ds, cfg);
  ASSERT_GE(cav.meta.loss_history.size(), 2u);
  EXPECT_EQ(cav.meta.loss_history.size(), cav.meta.iterations);
  EXPECT_LT(cav.meta.loss_history.back(), cav.meta.loss_history.front());
  EXPECT_LE(cav.meta.iterations, 50u);
}

TEST(SvmSgd, ShuffleSeedDeterminesResult) {
  const auto ds = gaussian_task(3);
  SgdConfig a, b;
  a.shuffle_seed = b.shuffle_seed = 5;
  const Cav x = fit_svm_sgd(ds, a), y = fit_svm_sgd(ds, b);
  EXPECT_EQ(x.direction, y.direction);
  EXPECT_EQ(x.intercept, y.intercept);
  b.shuffle_seed = 6;
  EXPECT_NE(fit_svm_sgd(ds, b).direction, x.direction);
}

TEST(Lda, IsotropicCrossMatchesFastCav) {
  for (std::size_t d : {2u, 3u, 6u}) {
    std::vector<double> mu_c(d, 0.0), mu_r(d, 0.0), a(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      mu_c[j] = 0.3 * static_cast<double>(j + 1);
      mu_r[j] = -0.7 + 0.1 * static_cast<double>(j);
    }
    const ConceptDataset ds(cross(mu_c, a), cross(mu_r, a));
    const Cav lda = fit_lda(ds);
    const Cav fast = fit_fastcav(ds);
    for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(lda.direction[j], fast.direction[j], 1e-9) << "d=" << d;
  }
}

TEST(Lda, AnisotropicCrossFollowsInverseCovariance) {
  // Scatter 2 a^2 per class per axis over n - 2 = 6 degrees of freedom gives
  // variances 1 and 100.
  const std::vector<double> a{std::sqrt(1.5), std::sqrt(150.0)};
  const ConceptDataset ds(cross({1.0, 1.0}, a), cross({0.0, 0.0}, a));
  const auto oracle = test::normalized({1.0 / 1.0, 1.0 / 100.0});
  for (auto solver : {LdaConfig::Solver::DirectSolve, LdaConfig::Solver::PseudoInverse, LdaConfig::Solver::Auto}) {
    const Cav cav = fit_lda(ds, {0.0, solver});
    EXPECT_NEAR(cav.direction[0], oracle[0], 1e-12);
    EXPECT_NEAR(cav.direction[1], oracle[1], 1e-12);
  }
}

TEST(Lda, RankDeficientDirectSolveIsSingular) {
  const ConceptDataset ds(test::random_matrix(10, 50, 1), test::random_matrix(10, 50, 2));
  EXPECT_CODE(fit_lda(ds, {0.0, LdaConfig::Solver::DirectSolve}), ErrorCode::SingularCovariance);
  EXPECT_NO_THROW(fit_lda(ds, {0.0, LdaConfig::Solver::PseudoInverse}));
  EXPECT_NO_THROW(fit_lda(ds, {0.1, LdaConfig::Solver::DirectSolve}));
}

TEST(Lda, SolversAgreeWithDenseOracle) {
  struct Case {
    std::size_t n, d;
    double ridge;
    LdaConfig::Solver solver;
  };
  const Case cases[] = {
      {40, 5, 0.0, LdaConfig::Solver::DirectSolve},   {40, 5, 0.3, LdaConfig::Solver::DirectSolve},
      {10, 30, 0.0, LdaConfig::Solver::PseudoInverse}, {10, 30, 0.5, LdaConfig::Solver::PseudoInverse},
      {40, 5, 0.0, LdaConfig::Solver::PseudoInverse},  {10, 30, 0.5, LdaConfig::Solver::Auto},
  };
  std::uint64_t seed = 10;
  for (const auto& c : cases) {
    auto cm = test::random_matrix(c.n, c.d, seed++);
    for (std::size_t i = 0; i < c.n; ++i) cm(i, 0) += 1.0;
    const ConceptDataset ds(cm, test::random_matrix(c.n, c.d, seed++));
    const Cav cav = fit_lda(ds, {c.ridge, c.solver});
    const auto oracle = test::dense_lda_direction(ds, c.ridge);
    EXPECT_GT(test::naive_cos(cav.direction, oracle), 1.0 - 1e-9) << c.n << "x" << c.d << " ridge " << c.ridge;
  }
}

TEST(Lda, InterceptSplitsClassMeans) {
  const std::vector<double> a{1.0, 1.0};
  const ConceptDataset ds(cross({2.0, 0.0}, a), cross({0.0, 0.0}, a));
  const Cav cav = fit_lda(ds);
  const double mid[] = {1.0, 0.0};
  EXPECT_NEAR(score(cav, mid), 0.0, 1e-12);
  EXPECT_CODE(fit_lda(ds, {-1.0, LdaConfig::Solver::Auto}), ErrorCode::InvalidArgument);
  EXPECT_CODE(fit_lda(ConceptDataset(M::from_rows({{1}}), M::from_rows({{0}}))), ErrorCode::InvalidArgument);
}

TEST(Ridge, MatchesNormalEquations) {
  std::uint64_t seed = 30;
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{40, 6}, {8, 25}}) {
    for (double lambda : {0.01, 1.0, 50.0}) {
      auto cm = test::random_matrix(n, d, seed++);
      for (std::size_t i = 0; i < n; ++i) cm(i, 1) += 0.8;
      const ConceptDataset ds(cm, test::random_matrix(n + 3, d, seed++));
      const Cav cav = fit_ridge(ds, lambda);
      EXPECT_GT(test::naive_cos(cav.direction, test::dense_ridge_direction(ds, lambda)), 1.0 - 1e-9)
          << n << "x" << d << " lambda " << lambda;
    }
  }
}

TEST(Ridge, HeavyPenaltyGivesMeanDifference) {
  const auto ds = gaussian_task(7);
  const Cav cav = fit_ridge(ds, 1e10);
  const Cav fast = fit_fastcav(ds);
  EXPECT_GT(cosine_similarity(cav, fast), 1.0 - 1e-6);
  EXPECT_CODE(fit_ridge(ds, -1.0), ErrorCode::InvalidArgument);
}

TEST(AllBaselines, SeparablePairTrainingAccuracy) {
  const auto ds = separable_pair();
  EXPECT_EQ(accuracy(fit_ridge(ds, 1.0), ds), 1.0);
  EXPECT_EQ(accuracy(fit_logreg(ds, 1e-4, 200), ds), 1.0);
  EXPECT_EQ(accuracy(fit_sparse_logreg(ds, 1e-3, 200), ds), 1.0);
  for (Method m : {Method::FastCav, Method::SvmSgd, Method::Ridge, Method::LogReg, Method::SparseLogReg}) {
    EXPECT_EQ(fit_method(m, ds).method, m);
  }
}

// Objective of the L1 logistic model, evaluated directly.
double l1_logistic_objective(const ConceptDataset& ds, double w1, double w2, double b, double lambda1) {
  long double loss = 0;
  auto add = [&](const M& m, double y) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double margin = y * (w1 * m(i, 0) + w2 * m(i, 1) + b);
      loss += std::log1p(std::exp(-margin));
    }
  };
  add(ds.concept_acts(), 1.0);
  add(ds.random_acts(), -1.0);
  return static_cast<double>(loss / ds.size()) + lambda1 * (std::fabs(w1) + std::fabs(w2));
}

TEST(SparseLogReg, UninformativeCoordinateIsZeroed) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n1(0.0, 0.5), n2(0.0, 1.0);
  std::vector<std::vector<double>> c, r;
  for (int i = 0; i < 60; ++i) {
    c.push_back({1.0 + n1(gen), n2(gen)});
    r.push_back({-1.0 + n1(gen), n2(gen)});
  }
  const ConceptDataset ds(M::from_rows(c), M::from_rows(r));
  const double lambda1 = 0.1;

  // Brute-force minimizer over a grid of the regularized objective.
  double best = std::numeric_limits<double>::infinity(), bw1 = 0, bw2 = 0;
  for (int i = 1; i <= 150; ++i) {
    for (int j = -50; j <= 50; ++j) {
      for (int k = -10; k <= 10; ++k) {
        const double w1 = 0.02 * i, w2 = 0.01 * j, b = 0.05 * k;
        const double f = l1_logistic_objective(ds, w1, w2, b, lambda1);
        if (f < best) {
          best = f;
          bw1 = w1;
          bw2 = w2;
        }
      }
    }
  }
  EXPECT_LE(std::fabs(bw2) / std::hypot(bw1, bw2), 0.05);

  const Cav cav = fit_sparse_logreg(ds, lambda1, 1000, 3);
  EXPECT_GT(cav.direction[0], 0.0);
  EXPECT_LE(std::fabs(cav.direction[1]), 0.05);
  EXPECT_EQ(cav.method, Method::SparseLogReg);
}

TEST(SupportVectors, WidelySeparatedClassesHaveNone) {
  const std::vector<double> mu_c{50.0, 0.0}, mu_r{-50.0, 0.0};
  const auto ds = make_concept_task(mu_c, mu_r, Covariance::isotropic(0.1), 50, 4);
  const Cav cav = fit_svm_sgd(ds);
  const auto sv = support_vector_ratio(cav, ds);
  EXPECT_LE(sv.concept_ratio, 0.05);
  EXPECT_LE(sv.random_ratio, 0.05);
}

TEST(SupportVectors, MatchesDirectMarginCount) {
  const auto ds = gaussian_task(9);
  SgdConfig cfg;
  cfg.max_epochs = 30;
  cfg.lambda = 1e-2;
  const Cav cav = fit_svm_sgd(ds, cfg);
  for (double slack : {0.0, 1e-3, 0.5}) {
    const auto sv = support_vector_ratio(cav, ds, slack);
    EXPECT_NEAR(sv.concept_ratio, test::margin_fraction(cav, ds.concept_acts(), 1.0, slack), 1e-12);
    EXPECT_NEAR(sv.random_ratio, test::margin_fraction(cav, ds.random_acts(), -1.0, slack), 1e-12);
  }
  EXPECT_CODE(support_vector_ratio(cav, ds, -1.0), ErrorCode::InvalidArgument);
}

TEST(SupportVectors, RejectsNonSvmCavs) {
  const auto ds = separable_pair();
  EXPECT_CODE(support_vector_ratio(fit_fastcav(ds), ds), ErrorCode::WrongMethod);
  EXPECT_CODE(support_vector_ratio(fit_ridge(ds, 1.0), ds), ErrorCode::WrongMethod);
}

}  // namespace
}  // namespace fastcav
