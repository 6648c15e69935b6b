#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastcav/matrix.hpp"
#include "fastcav/method.hpp"

namespace fastcav {

/// Method-specific record of how a CAV was fitted.
struct FitMeta {
  std::uint32_t iterations = 0;
  double regularization = 0.0;
  /// Norm of the unnormalized weight vector; the raw classifier is
  /// (direction * weight_norm, intercept * weight_norm).
  double weight_norm = 1.0;
  std::string detail;
  std::vector<double> loss_history;
  std::vector<std::string> warnings;
};

/// A concept activation vector: unit direction plus intercept, i.e. the linear
/// classifier score(x) = direction . x + intercept.
struct Cav {
  std::vector<double> direction;
  double intercept = 0.0;
  Method method = Method::FastCav;
  std::string concept_name;
  std::string layer;
  double fit_wall_time = 0.0;
  FitMeta meta;

  std::size_t dim() const noexcept { return direction.size(); }
  double raw_intercept() const noexcept { return intercept * meta.weight_norm; }
};

/// Concept activations D_c against random activations D_r, same width.
class ConceptDataset {
 public:
  ConceptDataset(ActivationMatrix concept_acts, ActivationMatrix random_acts,
                 std::string concept_name = {}, std::string layer = {});

  const ActivationMatrix& concept_acts() const noexcept { return concept_; }
  const ActivationMatrix& random_acts() const noexcept { return random_; }
  std::size_t dim() const noexcept { return concept_.cols(); }
  std::size_t size() const noexcept { return concept_.rows() + random_.rows(); }
  const std::string& concept_name() const noexcept { return concept_name_; }
  const std::string& layer() const noexcept { return layer_; }

  /// Same data with the roles of D_c and D_r exchanged.
  ConceptDataset swapped() const;

 private:
  ActivationMatrix concept_;
  ActivationMatrix random_;
  std::string concept_name_;
  std::string layer_;
};

/// Mean over D_c and D_r pooled.
std::vector<double> global_mean(const ConceptDataset& ds);

struct FastCavOptions {
  /// Worker threads for the column reduction; results do not depend on it.
  unsigned threads = 1;
};

inline constexpr double kZeroDirectionThreshold = 1e-12;

/// Mean-difference CAV: direction = normalize(mean_c - global mean),
/// intercept = -direction . global mean.
Cav fit_fastcav(const ConceptDataset& ds, const FastCavOptions& opts = {});

double score(const Cav& cav, std::span<const double> x);

/// Fraction classified correctly; score > 0 means concept, score <= 0 random.
double accuracy(const Cav& cav, const ConceptDataset& eval);

double cosine_similarity(const Cav& a, const Cav& b);

struct SimilarityStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t pairs = 0;
};

/// Mean and population std of cosine similarity over all unordered pairs.
SimilarityStats pairwise_similarity(std::span<const Cav> cavs);

/// Deterministic train/eval split of the rows of `m`: a seeded permutation,
/// the first round(fraction * n) rows held out. Matrices with fewer than
/// three rows are not split (train and eval both equal `m`).
struct RowSplit {
  ActivationMatrix train;
  ActivationMatrix eval;
  bool split = false;
};

RowSplit split_rows(const ActivationMatrix& m, double holdout_fraction, std::uint64_t seed);

}  // namespace fastcav
