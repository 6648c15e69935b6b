#pragma once

#include <cstdint>

#include "fastcav/cav.hpp"

namespace fastcav {

struct LearningRate {
  enum class Kind { Constant, InvScaling };
  Kind kind = Kind::InvScaling;
  double eta0 = 0.01;
  double power = 0.5;

  /// Step size at 1-based update counter t.
  double at(std::uint64_t t) const noexcept;
};

/// Per-sample SGD settings shared by the SVM and logistic baselines.
struct SgdConfig {
  std::uint32_t max_epochs = 1000;
  LearningRate schedule{};
  double lambda = 1e-4;
  std::uint64_t shuffle_seed = 0;
  /// Early stop once the epoch loss has failed to improve on the best seen by
  /// at least `tolerance` for `patience` consecutive epochs.
  double tolerance = 1e-6;
  std::uint32_t patience = 5;

  void validate() const;
};

/// Linear SVM by per-sample SGD on lambda*|w|^2 + mean hinge loss, labels +1
/// for D_c and -1 for D_r.
Cav fit_svm_sgd(const ConceptDataset& ds, const SgdConfig& cfg = {});

struct LdaConfig {
  enum class Solver {
    /// Dense d x d Cholesky solve.
    DirectSolve,
    /// Minimum-norm solve through the n x n Gram matrix of centered samples;
    /// never forms the d x d covariance.
    PseudoInverse,
    /// DirectSolve when d < n - 2, otherwise PseudoInverse.
    Auto,
  };
  double ridge = 0.0;
  Solver solver = Solver::Auto;
};

/// Fisher discriminant: solves (S_w + ridge*I) w = mean_c - mean_r where S_w
/// is the pooled within-class covariance (divisor n - 2). The intercept puts
/// the boundary midway between the class means along w.
Cav fit_lda(const ConceptDataset& ds, const LdaConfig& cfg = {});

/// Least squares on +-1 labels with an L2 penalty; intercept by centering.
/// Solved in the primal (d x d) or dual (n x n), whichever is smaller.
Cav fit_ridge(const ConceptDataset& ds, double lambda);

/// L2-regularized logistic regression by per-sample SGD.
Cav fit_logreg(const ConceptDataset& ds, double lambda, std::uint32_t epochs,
               std::uint64_t shuffle_seed = 0);

/// L1-regularized logistic regression: SGD step followed by a proximal
/// soft-threshold of the weights.
Cav fit_sparse_logreg(const ConceptDataset& ds, double lambda1, std::uint32_t epochs,
                      std::uint64_t shuffle_seed = 0);

inline constexpr double kDefaultSupportSlack = 1e-3;

struct SupportVectorRatio {
  double concept_ratio = 0.0;
  double random_ratio = 0.0;
};

/// Fraction of each class with hinge margin y (w . x + b0) <= 1 + slack, using
/// the unnormalized classifier. Requires a CAV from fit_svm_sgd.
SupportVectorRatio support_vector_ratio(const Cav& cav, const ConceptDataset& ds,
                                        double slack = kDefaultSupportSlack);

}  // namespace fastcav
