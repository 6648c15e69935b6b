#include "fastcav/cav.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"
#include "fastcav/rng.hpp"

namespace fastcav {

ConceptDataset::ConceptDataset(ActivationMatrix concept_acts, ActivationMatrix random_acts,
                               std::string concept_name, std::string layer)
    : concept_(std::move(concept_acts)),
      random_(std::move(random_acts)),
      concept_name_(std::move(concept_name)),
      layer_(std::move(layer)) {
  require(concept_.cols() == random_.cols(), ErrorCode::DimensionMismatch,
          "concept set has width " + std::to_string(concept_.cols()) + " but random set has " +
              std::to_string(random_.cols()));
}

ConceptDataset ConceptDataset::swapped() const {
  return ConceptDataset(random_, concept_, concept_name_, layer_);
}

std::vector<double> global_mean(const ConceptDataset& ds) {
  auto sum = column_sums(ds.concept_acts());
  axpy(1.0, column_sums(ds.random_acts()), sum);
  scale(1.0 / static_cast<double>(ds.size()), sum);
  return sum;
}

Cav fit_fastcav(const ConceptDataset& ds, const FastCavOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const double n_c = static_cast<double>(ds.concept_acts().rows());
  const double n = static_cast<double>(ds.size());

  // One pass per set: sum_c and sum_r give both the concept mean and the
  // pooled mean.
  std::vector<double> direction = column_sums(ds.concept_acts(), opts.threads);
  std::vector<double> mu = column_sums(ds.random_acts(), opts.threads);
  axpy(1.0, direction, mu);
  scale(1.0 / n, mu);
  scale(1.0 / n_c, direction);
  axpy(-1.0, mu, direction);

  const double len = norm2(direction);
  require(len >= kZeroDirectionThreshold, ErrorCode::ZeroDirection,
          "concept mean coincides with the global mean (|direction| = " + std::to_string(len) + ")");
  scale(1.0 / len, direction);

  Cav cav;
  cav.intercept = -dot(direction, mu);
  cav.direction = std::move(direction);
  cav.method = Method::FastCav;
  cav.concept_name = ds.concept_name();
  cav.layer = ds.layer();
  cav.meta.iterations = 1;
  cav.meta.weight_norm = len;
  cav.meta.detail = "mean-difference";
  if (ds.concept_acts().rows() != ds.random_acts().rows()) {
    cav.meta.warnings.push_back("unequal set sizes (" + std::to_string(ds.concept_acts().rows()) +
                                " concept vs " + std::to_string(ds.random_acts().rows()) +
                                " random); the global mean is weighted toward the larger set");
  }
  cav.fit_wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cav;
}

double score(const Cav& cav, std::span<const double> x) {
  require(x.size() == cav.dim(), ErrorCode::DimensionMismatch,
          "input has width " + std::to_string(x.size()) + ", CAV has " + std::to_string(cav.dim()));
  return dot(cav.direction, x) + cav.intercept;
}

double accuracy(const Cav& cav, const ConceptDataset& eval) {
  require(eval.dim() == cav.dim(), ErrorCode::DimensionMismatch,
          "evaluation data has width " + std::to_string(eval.dim()) + ", CAV has " +
              std::to_string(cav.dim()));
  std::size_t correct = 0;
  const auto& c = eval.concept_acts();
  const auto& r = eval.random_acts();
  for (std::size_t i = 0; i < c.rows(); ++i) correct += score(cav, c.row(i)) > 0.0 ? 1 : 0;
  for (std::size_t i = 0; i < r.rows(); ++i) correct += score(cav, r.row(i)) <= 0.0 ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(eval.size());
}

double cosine_similarity(const Cav& a, const Cav& b) {
  require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "CAVs differ in width");
  return dot(a.direction, b.direction);
}

SimilarityStats pairwise_similarity(std::span<const Cav> cavs) {
  require(cavs.size() >= 2, ErrorCode::InvalidArgument,
          "pairwise similarity needs at least two CAVs");
  std::vector<double> sims;
  sims.reserve(cavs.size() * (cavs.size() - 1) / 2);
  for (std::size_t i = 0; i < cavs.size(); ++i) {
    for (std::size_t j = i + 1; j < cavs.size(); ++j) {
      sims.push_back(cosine_similarity(cavs[i], cavs[j]));
    }
  }
  const Summary s = summarize(sims);
  return {s.mean, s.std, sims.size()};
}

RowSplit split_rows(const ActivationMatrix& m, double holdout_fraction, std::uint64_t seed) {
  require(holdout_fraction > 0.0 && holdout_fraction < 1.0, ErrorCode::InvalidArgument,
          "holdout fraction must lie in (0, 1)");
  const std::size_t n = m.rows();
  if (n < 3) return RowSplit{m, m, false};
  std::size_t held = static_cast<std::size_t>(std::lround(holdout_fraction * static_cast<double>(n)));
  held = std::clamp<std::size_t>(held, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> eval_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
  std::sort(eval_idx.begin(), eval_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return RowSplit{m.gather_rows(train_idx), m.gather_rows(eval_idx), true};
}

}  // namespace fastcav
