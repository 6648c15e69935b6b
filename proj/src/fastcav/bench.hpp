#pragma once

// Timing, scaling, sensitivity and training-tracking studies.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fastcav/cav.hpp"
#include "fastcav/fit.hpp"
#include "fastcav/manifest.hpp"
#include "fastcav/stats.hpp"
#include "fastcav/table.hpp"

namespace fastcav {

/// A fit routine under measurement.
struct TimedMethod {
  std::string name;
  std::function<Cav(const ConceptDataset&)> fit;
  /// Set when the routine would use internal worker threads; time_fit refuses
  /// such methods.
  bool internally_parallel = false;
};

TimedMethod timed_method(Method method, const FitSettings& settings = {}, std::uint64_t seed = 0);

struct TimingRecord {
  std::string method;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint32_t repeats = 0;
  std::vector<double> samples;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
};

struct TimingOptions {
  /// Overwrite a buffer larger than the last-level cache before every timed
  /// fit so each measurement streams the activations from memory.
  bool evict_cache = true;
  std::size_t evict_bytes = std::size_t{256} << 20;
};

/// Wall-clock seconds per fit on a monotonic clock. One untimed warm-up fit
/// precedes `repeats` timed fits (repeats >= 3). Only the fit call is inside
/// the timed region.
TimingRecord time_fit(const TimedMethod& method, const ConceptDataset& ds, std::uint32_t repeats,
                      const TimingOptions& options = {});

struct SpeedupComparison {
  /// slow.mean / fast.mean
  double ratio = 0.0;
  WelchResult welch;
};

SpeedupComparison compare_timings(const TimingRecord& fast, const TimingRecord& slow);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Least-squares slope of log(y) on log(x) with a 95% confidence interval.
SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Throws DegenerateGrid unless the grid has >= 3 strictly increasing points
/// with a common ratio (within 5%).
void check_geometric_grid(const std::vector<std::size_t>& grid, const std::string& name);

struct ScalingParams {
  std::vector<std::size_t> n_grid{100, 1000, 10000};
  std::vector<std::size_t> d_grid{10000, 100000, 1000000};
  /// Sample count used while sweeping d.
  std::size_t n_fixed = 120;
  /// Width used while sweeping n.
  std::size_t d_fixed = 10000;
  std::uint32_t repeats = 5;
  double separation = 3.0;
  std::uint64_t seed = kDefaultSeed;
  TimingOptions timing{};
};

struct ScalingResult {
  Table table;
  SlopeFit n_slope;
  SlopeFit d_slope;
};

/// Times `method` across the n and d grids (n split evenly between D_c and
/// D_r) and regresses log(min time) on log(n) and log(d).
ScalingResult scaling_study(const TimedMethod& method, const ScalingParams& params);

struct SensitivityParams {
  std::size_t d = 50;
  double separation = 2.0;
  double sigma = 1.0;
  /// |D_c| = |D_r| values for the set-size panel.
  std::vector<std::size_t> set_sizes{10, 30, 60, 120};
  /// Random-set counts for the resampling panel.
  std::vector<std::size_t> random_set_counts{5, 30, 100};
  std::size_t random_sets_for_size_panel = 30;
  std::size_t set_size_for_count_panel = 60;
  std::size_t n_eval_per_class = 500;
  std::uint32_t seeds = 10;
  std::uint64_t seed = kDefaultSeed;
  Method method = Method::FastCav;
  FitSettings settings{};
  unsigned threads = 1;
};

struct SensitivityResult {
  /// set_size, acc_mean, acc_std, acc_std_within
  Table by_set_size;
  /// n_random_sets, acc_mean, acc_std, acc_std_within
  Table by_random_sets;
};

/// For each grid point and seed, averages held-out CAV accuracy over the
/// random sets; acc_mean/acc_std are taken across seeds of those averages,
/// acc_std_within is the mean per-seed spread across random sets.
SensitivityResult sensitivity_study(const SensitivityParams& params);

struct TrackingParams {
  Method method = Method::FastCav;
  double learned_threshold = 0.7;
  double holdout_fraction = 1.0 / 3.0;
  FitSettings settings{};
  unsigned threads = 1;
};

struct TrackingGrid {
  std::vector<std::string> epochs;
  std::vector<std::string> layers;
  std::vector<std::string> concepts;
  /// accuracy[epoch][layer][concept], averaged over random sets.
  std::vector<std::vector<std::vector<double>>> accuracy;
  /// auc[layer][concept]
  std::vector<std::vector<double>> auc;
  /// rank[layer]: concept indices by descending AUC, ties by name.
  std::vector<std::vector<std::size_t>> rank;
  /// learned_ratio[epoch][layer]
  std::vector<std::vector<double>> learned_ratio;
  double learned_threshold = 0.7;

  Table accuracy_table() const;
  Table auc_table() const;
  Table learned_table() const;
};

/// Normalized trapezoidal area under a curve sampled at unit spacing.
double normalized_auc(const std::vector<double>& values);

/// Fits CAVs for every (epoch, layer, concept, random set) of the manifest and
/// summarizes accuracy over training.
TrackingGrid tracking_study(const ExperimentManifest& manifest, const TrackingParams& params);

}  // namespace fastcav
