#pragma once

// File-level drivers behind the CLI subcommands. Each writes its outputs
// under an output directory; CSVs start with "# key=value" run metadata.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastcav/bench.hpp"
#include "fastcav/method.hpp"
#include "fastcav/synth.hpp"

namespace fastcav {

struct RunOptions {
  std::uint64_t seed = kDefaultSeed;
  bool seed_set = false;
  unsigned threads = 1;
  /// Also emit "<table>_long.csv" tidy tables.
  bool plot_data = false;
  std::string command_line;
  std::function<void(const std::string&)> log;
};

struct FitRunOptions {
  std::vector<Method> methods;
  double holdout_fraction = 1.0 / 3.0;
  FitSettings settings{};
};

/// Fits one CAV per (layer, concept, random set, method) and writes
/// cavs/<layer>/<concept>/<method>__<random>.cavk plus summary.csv. On failure
/// writes FAILED with the diagnostic and rethrows.
void run_fit(const std::filesystem::path& manifest, const FitRunOptions& fit,
             const std::filesystem::path& out, const RunOptions& opts);

struct TcavRunOptions {
  double alpha = 0.05;
  double correction = 1.0;
  Method method = Method::FastCav;
  FitSettings settings{};
};

/// Gradients are read from <gradients>/<class>/<layer>.cavk. Writes tcav.csv
/// (concept,layer,class,mean,std,p_value,significant) and tcav_scores.csv.
void run_tcav(const std::filesystem::path& manifest, const std::filesystem::path& gradients,
              const TcavRunOptions& tcav, const std::filesystem::path& out, const RunOptions& opts);

struct BenchRunOptions {
  std::vector<Method> methods{Method::FastCav, Method::SvmSgd};
  std::size_t n = 120;
  std::size_t d = 100000;
  std::uint32_t repeats = 5;
  /// Use the first concept / random set / layer of this manifest instead of
  /// synthetic data.
  std::optional<std::filesystem::path> manifest;
  FitSettings settings{};
  TimingOptions timing{};
};

/// Writes bench.csv with per-method timing and the speedup / Welch p-value
/// relative to the first method.
void run_bench(const BenchRunOptions& bench, const std::filesystem::path& out, const RunOptions& opts);

void run_scaling(Method method, const ScalingParams& params, const std::filesystem::path& out,
                 const RunOptions& opts, const FitSettings& settings = {});

void run_sensitivity(const SensitivityParams& params, const std::filesystem::path& out, const RunOptions& opts);

void run_tracking(const std::filesystem::path& manifest, const TrackingParams& params,
                  const std::filesystem::path& out, const RunOptions& opts);

struct SynthRunOptions {
  FixtureParams fixture{};
  /// Write planted gradients under <out>/gradients when set.
  std::optional<double> gradient_p_align;
  std::string gradient_class = "target";
  std::size_t gradient_rows = 200;
  /// Emit equivalence.csv for these methods when non-empty.
  std::vector<Method> report_methods;
  std::uint32_t report_trials = 20;
};

void run_synth(const SynthRunOptions& synth, const std::filesystem::path& out, const RunOptions& opts);

/// One line per tensor: header summary and finiteness. Manifests expand to
/// every tensor they reference.
std::vector<std::string> inspect(const std::vector<std::filesystem::path>& paths);

}  // namespace fastcav
