#pragma once

#include <span>
#include <string>
#include <vector>

#include "fastcav/cav.hpp"
#include "fastcav/matrix.hpp"

namespace fastcav {

/// Gradients of one class logit with respect to a layer's activations, one
/// row per input of that class.
struct GradientBatch {
  ActivationMatrix grads;
  std::string layer;
  std::string class_name;
};

/// Directional derivative of the class logit along the CAV: grad . direction.
double sensitivity(const Cav& cav, std::span<const double> grad);

/// Fraction of rows with strictly positive sensitivity.
double tcav_score(const Cav& cav, const GradientBatch& batch);

struct TcavResult {
  std::string concept_name;
  std::string layer;
  std::string class_name;
  std::vector<double> scores;
  std::vector<double> random_scores;
  double mean = 0.0;
  double std = 0.0;
  /// Uncorrected two-sided Welch p-value, concept scores vs random scores.
  double p_value = 1.0;
  double alpha = 0.05;
  double correction = 1.0;
  /// p_value * correction < alpha.
  bool significant = false;
  std::string test = "welch-two-sided";
};

/// Scores every concept CAV and every random CAV on `batch` and tests the two
/// score samples against each other. `correction` is the Bonferroni factor
/// (typically the number of concepts tested).
TcavResult tcav_with_significance(std::span<const Cav> concept_cavs, std::span<const Cav> random_cavs,
                                  const GradientBatch& batch, double alpha, double correction = 1.0);

}  // namespace fastcav
