#include "fastcav/tcav.hpp"

#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"
#include "fastcav/stats.hpp"

namespace fastcav {

double sensitivity(const Cav& cav, std::span<const double> grad) {
  require(grad.size() == cav.dim(), ErrorCode::DimensionMismatch,
          "gradient has width " + std::to_string(grad.size()) + ", CAV has " + std::to_string(cav.dim()));
  return dot(grad, cav.direction);
}

double tcav_score(const Cav& cav, const GradientBatch& batch) {
  require(batch.grads.cols() == cav.dim(), ErrorCode::DimensionMismatch,
          "gradients have width " + std::to_string(batch.grads.cols()) + ", CAV has " +
              std::to_string(cav.dim()));
  std::size_t positive = 0;
  for (std::size_t i = 0; i < batch.grads.rows(); ++i) {
    if (dot(batch.grads.row(i), cav.direction) > 0.0) ++positive;
  }
  return static_cast<double>(positive) / static_cast<double>(batch.grads.rows());
}

TcavResult tcav_with_significance(std::span<const Cav> concept_cavs, std::span<const Cav> random_cavs,
                                  const GradientBatch& batch, double alpha, double correction) {
  require(concept_cavs.size() >= 2 && random_cavs.size() >= 2, ErrorCode::InvalidArgument,
          "significance testing needs at least two concept CAVs and two random CAVs");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  require(correction >= 1.0, ErrorCode::InvalidArgument, "correction factor must be >= 1");

  TcavResult r;
  r.concept_name = concept_cavs.front().concept_name;
  r.layer = batch.layer.empty() ? concept_cavs.front().layer : batch.layer;
  r.class_name = batch.class_name;
  r.alpha = alpha;
  r.correction = correction;
  for (const auto& cav : concept_cavs) r.scores.push_back(tcav_score(cav, batch));
  for (const auto& cav : random_cavs) r.random_scores.push_back(tcav_score(cav, batch));

  const Summary s = summarize(r.scores);
  r.mean = s.mean;
  r.std = s.std;
  r.p_value = welch_t_test(r.scores, r.random_scores).p_value;
  r.significant = r.p_value * correction < alpha;
  return r;
}

}  // namespace fastcav
