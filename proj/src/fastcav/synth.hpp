#pragma once

// Seeded Gaussian fixtures and the Monte-Carlo checks built on them.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fastcav/cav.hpp"
#include "fastcav/fit.hpp"
#include "fastcav/manifest.hpp"
#include "fastcav/table.hpp"
#include "fastcav/tcav.hpp"
#include "fastcav/tensor_io.hpp"

namespace fastcav {

class Covariance {
 public:
  enum class Kind { Isotropic, Diagonal, Full };

  static Covariance isotropic(double sigma);
  static Covariance diagonal(std::vector<double> variances);
  /// Row-major d x d symmetric positive-definite matrix.
  static Covariance full(std::vector<double> matrix, std::size_t d);

  Kind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<double>& variances() const noexcept { return values_; }

  /// Throws if incompatible with dimension d.
  void check_dim(std::size_t d) const;
  /// Sigma^{-1} v.
  std::vector<double> solve(std::span<const double> v) const;
  /// x = L z for a factor L with L L^T = Sigma, written into `out`.
  void apply_factor(std::span<const double> z, std::span<double> out) const;

 private:
  Kind kind_ = Kind::Isotropic;
  double sigma_ = 1.0;
  std::vector<double> values_;  // variances, or the full matrix
  std::vector<double> factor_;  // lower Cholesky factor for Kind::Full
  std::size_t dim_ = 0;
};

struct GaussianSpec {
  std::vector<double> mu;
  Covariance covariance = Covariance::isotropic(1.0);
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

/// n i.i.d. rows of N(mu, Sigma): row-wise standard normals through the
/// covariance factor, then shifted by mu.
ActivationMatrix sample_gaussian(const GaussianSpec& spec);

/// D_c ~ N(mu_c, Sigma), D_r ~ N(mu_r, Sigma), n_per_class rows each, drawn
/// from independent streams of `seed`.
ConceptDataset make_concept_task(std::span<const double> mu_c, std::span<const double> mu_r,
                                 const Covariance& covariance, std::size_t n_per_class,
                                 std::uint64_t seed);

/// e_axis * distance in d dimensions.
std::vector<double> axis_vector(std::size_t d, std::size_t axis, double distance);

struct TaskParams {
  std::vector<double> mu_c;
  std::vector<double> mu_r;
  Covariance covariance = Covariance::isotropic(1.0);
  std::size_t n_per_class = 500;
  std::size_t n_eval_per_class = 1000;
};

/// Per method: cosine of the fitted direction to normalize(mu_c - mu_r) and
/// to normalize(Sigma^-1 (mu_c - mu_r)), held-out accuracy and fit time,
/// averaged over `trials` seeded draws. Fit failures are counted, not fatal.
Table equivalence_report(const TaskParams& task, std::span<const Method> methods, std::uint32_t trials,
                         std::uint64_t seed, const FitSettings& settings = {});

inline constexpr double kPlantedGradientNoise = 0.1;

/// round(p_align * n) rows of +v and the rest -v, in seeded random order,
/// plus N(0, noise^2 I).
GradientBatch planted_gradient_batch(std::span<const double> v, double p_align, std::size_t n,
                                     std::uint64_t seed, double noise = kPlantedGradientNoise);

/// On-disk fixture: concept k has mean separation * sigma along axis
/// k mod d; random sets are N(0, sigma^2 I). With epochs > 0 every set gets
/// one file per epoch and concept k at epoch t sits at distance
/// t * epoch_step * sigma * (k + 1) / n_concepts.
struct FixtureParams {
  std::size_t d = 2;
  double sigma = 1.0;
  double separation = 3.0;
  std::size_t n_per_set = 500;
  std::size_t n_concepts = 1;
  std::size_t n_random_sets = 5;
  std::vector<std::string> layers{"layer"};
  std::size_t epochs = 0;
  double epoch_step = 0.5;
  std::vector<std::string> methods{"fastcav"};
  Dtype dtype = Dtype::Float64;
  std::uint64_t seed = kDefaultSeed;
};

/// Writes tensors under `dir` plus `dir/manifest.json`; returns the manifest.
ExperimentManifest write_fixture(const std::filesystem::path& dir, const FixtureParams& params);

/// Writes planted gradients for every layer to `dir/<class_name>/<layer>.cavk`,
/// aligned with concept 0's planted axis.
void write_planted_gradients(const std::filesystem::path& dir, const FixtureParams& params,
                             const std::string& class_name, double p_align, std::size_t n,
                             std::uint64_t seed);

/// Support-vector counting needs a solution whose hinge margins are resolved
/// more finely than the counting slack. The study therefore normalizes the
/// SGD step by the mean squared row norm and runs a fixed, long epoch budget
/// without early stopping; the achieved margin resolution is reported.
struct SupportVectorStudyParams {
  std::vector<std::size_t> dims{16, 4096};
  std::size_t n_per_class = 50;
  double separation = 1.0;
  double sigma = 1.0;
  double lambda = 1e-2;
  std::uint32_t epochs = 160000;
  double slack = 1e-3;
  std::uint64_t seed = kDefaultSeed;
};

/// Columns: d, concept_ratio, random_ratio, ratio, epochs, final_loss,
/// margin_resolution.
Table support_vector_study(const SupportVectorStudyParams& params);

}  // namespace fastcav
