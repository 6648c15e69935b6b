// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fastcav/fastcav.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError {
  std::string message;
};

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool plot_data = false;
  bool quiet = false;
  std::string out;
};

void log_to_stderr(const char* message, void* user) {
  if (user == nullptr) std::fprintf(stderr, "fastcav: %s\n", message);
}

fcav_method parse_method_or_throw(const std::string& name) {
  fcav_method m{};
  if (fcav_method_parse(name.c_str(), &m) != FCAV_OK) {
    throw UsageError{"unknown method '" + name + "' (expected fastcav, svm, lda, ridge, logreg, sparse_logreg)"};
  }
  return m;
}

std::vector<fcav_method> parse_methods(const std::vector<std::string>& names) {
  std::vector<fcav_method> out;
  for (const auto& n : names) out.push_back(parse_method_or_throw(n));
  return out;
}

int finish(fcav_status status) {
  if (status == FCAV_OK) return kExitOk;
  std::fprintf(stderr, "fastcav: error (%s): %s\n", fcav_status_string(status), fcav_last_error());
  return status == FCAV_ERR_USAGE ? kExitUsage : kExitRuntime;
}

void add_common(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("--seed", c.seed, "Base seed (default 42, or the manifest seed)");
  cmd->add_option("--threads", c.threads, "Worker threads for untimed work")->check(CLI::PositiveNumber);
  cmd->add_flag("--plot-data", c.plot_data, "Also write tidy long-format *_long.csv tables");
  cmd->add_flag("-q,--quiet", c.quiet, "Suppress progress messages");
  if (needs_out) cmd->add_option("-o,--out", c.out, "Output directory")->required();
}

void add_fit_options(CLI::App* cmd, fcav_fit_options& f, std::string& lda_solver) {
  cmd->add_option("--svm-lambda", f.sgd_lambda, "SGD L2 penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--svm-epochs", f.sgd_max_epochs, "SGD epoch cap");
  cmd->add_option("--eta0", f.sgd_eta0, "SGD initial step size")->check(CLI::PositiveNumber);
  cmd->add_option("--power", f.sgd_power, "SGD inverse-scaling exponent");
  cmd->add_flag("--constant-rate", f.sgd_constant_rate, "Use a constant SGD step size");
  cmd->add_option("--tolerance", f.sgd_tolerance, "SGD early-stop tolerance");
  cmd->add_option("--patience", f.sgd_patience, "SGD early-stop patience in epochs");
  cmd->add_option("--lda-ridge", f.lda_ridge, "Ridge added to the LDA covariance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--lda-solver", lda_solver, "LDA solver")->check(CLI::IsMember({"auto", "direct", "pinv"}));
  cmd->add_option("--ridge-lambda", f.ridge_lambda, "Ridge penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--logreg-lambda", f.logreg_lambda, "Logistic L2 penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--sparse-lambda", f.sparse_lambda1, "Sparse logistic L1 penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--logreg-epochs", f.logreg_epochs, "Logistic SGD epochs");
}

fcav_lda_solver lda_solver_value(const std::string& s) {
  if (s == "direct") return FCAV_LDA_DIRECT;
  if (s == "pinv") return FCAV_LDA_PSEUDO_INVERSE;
  return FCAV_LDA_AUTO;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Concept activation vectors: fitting, TCAV scoring and benchmark studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fcav_version()));

  Common common;
  fcav_fit_options fit;
  fcav_fit_options_default(&fit);
  std::string lda_solver = "auto";

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit CAVs for every concept, layer and random set of a manifest");
  std::string fit_manifest;
  std::vector<std::string> fit_methods;
  double holdout = 1.0 / 3.0;
  fit_cmd->add_option("manifest", fit_manifest, "Experiment manifest (JSON)")->required();
  fit_cmd->add_option("-m,--method", fit_methods, "Method(s); defaults to the manifest's list");
  fit_cmd->add_option("--holdout", holdout, "Held-out fraction per set for accuracy")->check(CLI::Range(0.0, 0.9));
  add_common(fit_cmd, common, true);
  add_fit_options(fit_cmd, fit, lda_solver);

  // tcav
  auto* tcav_cmd = app.add_subcommand("tcav", "TCAV scores and significance against random CAVs");
  std::string tcav_manifest, gradients, tcav_method = "fastcav";
  double alpha = 0.05, correction = 1.0;
  tcav_cmd->add_option("manifest", tcav_manifest, "Experiment manifest (JSON)")->required();
  tcav_cmd->add_option("-g,--gradients", gradients, "Directory of <class>/<layer>.cavk gradient tensors")->required();
  tcav_cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  tcav_cmd->add_option("--correction", correction, "Bonferroni factor")->check(CLI::Range(1.0, 1e9));
  tcav_cmd->add_option("-m,--method", tcav_method, "CAV method");
  add_common(tcav_cmd, common, true);
  add_fit_options(tcav_cmd, fit, lda_solver);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Time fits of several methods on one dataset");
  fcav_bench_options bench;
  fcav_bench_options_default(&bench);
  std::vector<std::string> bench_methods{"fastcav", "svm"};
  std::string bench_manifest;
  bool no_evict = false;
  bench_cmd->add_option("-m,--method", bench_methods, "Methods; the first is the speedup reference");
  bench_cmd->add_option("-n", bench.n, "Total samples (split evenly)")->check(CLI::Range(2, 1 << 30));
  bench_cmd->add_option("-d", bench.d, "Dimension")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeats", bench.repeats, "Timed repeats (>= 3)");
  bench_cmd->add_option("--manifest", bench_manifest, "Use the first concept/random set/layer of a manifest");
  bench_cmd->add_flag("--no-evict", no_evict, "Skip cache eviction between timed fits");
  add_common(bench_cmd, common, true);
  add_fit_options(bench_cmd, fit, lda_solver);

  // scaling
  auto* scaling_cmd = app.add_subcommand("scaling", "Fit-time scaling in n and d with log-log slopes");
  fcav_scaling_options scaling;
  fcav_scaling_options_default(&scaling);
  std::string scaling_method = "fastcav";
  std::vector<std::size_t> n_grid, d_grid;
  scaling_cmd->add_option("-m,--method", scaling_method, "Method to time");
  scaling_cmd->add_option("--n-grid", n_grid, "Geometric grid of sample counts")->delimiter(',');
  scaling_cmd->add_option("--d-grid", d_grid, "Geometric grid of dimensions")->delimiter(',');
  scaling_cmd->add_option("--n-fixed", scaling.n_fixed, "Sample count while sweeping d");
  scaling_cmd->add_option("--d-fixed", scaling.d_fixed, "Dimension while sweeping n");
  scaling_cmd->add_option("--repeats", scaling.repeats, "Timed repeats per grid point (>= 3)");
  scaling_cmd->add_option("--separation", scaling.separation, "Class mean distance");
  scaling_cmd->add_flag("--no-evict", no_evict, "Skip cache eviction between timed fits");
  add_common(scaling_cmd, common, true);
  add_fit_options(scaling_cmd, fit, lda_solver);

  // sensitivity
  auto* sens_cmd = app.add_subcommand("sensitivity", "Accuracy versus concept-set size and random-set count");
  fcav_sensitivity_options sens;
  fcav_sensitivity_options_default(&sens);
  std::string sens_method = "fastcav";
  std::vector<std::size_t> set_sizes, random_set_counts;
  sens_cmd->add_option("-m,--method", sens_method, "CAV method");
  sens_cmd->add_option("-d", sens.d, "Dimension")->check(CLI::PositiveNumber);
  sens_cmd->add_option("--separation", sens.separation, "Class mean distance in units of sigma");
  sens_cmd->add_option("--sigma", sens.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  sens_cmd->add_option("--set-sizes", set_sizes, "Concept set sizes")->delimiter(',');
  sens_cmd->add_option("--random-set-counts", random_set_counts, "Random set counts")->delimiter(',');
  sens_cmd->add_option("--random-sets", sens.random_sets_for_size_panel, "Random sets in the set-size panel");
  sens_cmd->add_option("--set-size", sens.set_size_for_count_panel, "Set size in the random-set panel");
  sens_cmd->add_option("--eval", sens.n_eval_per_class, "Evaluation samples per class");
  sens_cmd->add_option("--seeds", sens.seeds, "Independent repetitions")->check(CLI::PositiveNumber);
  add_common(sens_cmd, common, true);
  add_fit_options(sens_cmd, fit, lda_solver);

  // tracking
  auto* track_cmd = app.add_subcommand("tracking", "CAV accuracy across training epochs");
  fcav_tracking_options tracking;
  fcav_tracking_options_default(&tracking);
  std::string track_manifest, track_method = "fastcav";
  track_cmd->add_option("manifest", track_manifest, "Experiment manifest with epochs")->required();
  track_cmd->add_option("-m,--method", track_method, "CAV method");
  track_cmd->add_option("--learned-threshold", tracking.learned_threshold, "Accuracy above which a concept counts as learned");
  track_cmd->add_option("--holdout", tracking.holdout_fraction, "Held-out fraction per set")->check(CLI::Range(0.0, 0.9));
  add_common(track_cmd, common, true);
  add_fit_options(track_cmd, fit, lda_solver);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic Gaussian fixture and manifest");
  fcav_synth_options synth;
  fcav_synth_options_default(&synth);
  std::vector<std::string> synth_layers, synth_methods, report_methods;
  std::string dtype = "f64", gradient_class = "target";
  double p_align = -1.0;
  synth_cmd->add_option("-d", synth.d, "Dimension")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--sigma", synth.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--separation", synth.separation, "Concept mean distance in units of sigma");
  synth_cmd->add_option("-n,--rows", synth.n_per_set, "Rows per set")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--concepts", synth.n_concepts, "Number of concepts")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--random-sets", synth.n_random_sets, "Number of random sets")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--layer", synth_layers, "Layer names (repeatable)");
  synth_cmd->add_option("--epochs", synth.epochs, "Epoch count for a planted training schedule (0: none)");
  synth_cmd->add_option("--epoch-step", synth.epoch_step, "Per-epoch concept distance step in units of sigma");
  synth_cmd->add_option("-m,--method", synth_methods, "Methods recorded in the manifest");
  synth_cmd->add_option("--dtype", dtype, "Tensor dtype")->check(CLI::IsMember({"f32", "f64"}));
  synth_cmd->add_option("--gradients", p_align, "Also write planted gradients with this aligned fraction")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--gradient-class", gradient_class, "Class name for planted gradients");
  synth_cmd->add_option("--gradient-rows", synth.gradient_rows, "Rows of planted gradients");
  synth_cmd->add_option("--report", report_methods, "Write equivalence.csv for these methods");
  synth_cmd->add_option("--report-trials", synth.report_trials, "Trials for the equivalence report");
  add_common(synth_cmd, common, true);

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Print CAVK headers and check finiteness");
  std::vector<std::string> inspect_paths;
  inspect_cmd->add_option("paths", inspect_paths, "CAVK tensors or manifests")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    fcav_run_options run;
    fcav_run_options_default(&run);
    const CLI::App* active = app.get_subcommands().front();
    const CLI::Option* seed_opt = active->get_option_no_throw("--seed");
    if (seed_opt != nullptr && seed_opt->count() > 0) {
      run.seed = common.seed;
      run.seed_set = 1;
    }
    run.threads = common.threads;
    run.plot_data = common.plot_data ? 1 : 0;
    run.command_line = command_line.c_str();
    run.log = log_to_stderr;
    run.log_user = common.quiet ? &common : nullptr;
    fit.lda_solver = lda_solver_value(lda_solver);
    fit.threads = 1;

    if (fit_cmd->parsed()) {
      const auto methods = parse_methods(fit_methods);
      return finish(fcav_run_fit(fit_manifest.c_str(), methods.data(), methods.size(), holdout, &fit,
                                 common.out.c_str(), &run));
    }
    if (tcav_cmd->parsed()) {
      return finish(fcav_run_tcav(tcav_manifest.c_str(), gradients.c_str(), parse_method_or_throw(tcav_method), alpha,
                                  correction, &fit, common.out.c_str(), &run));
    }
    if (bench_cmd->parsed()) {
      const auto methods = parse_methods(bench_methods);
      bench.methods = methods.data();
      bench.n_methods = methods.size();
      bench.manifest = bench_manifest.empty() ? nullptr : bench_manifest.c_str();
      bench.evict_cache = no_evict ? 0 : 1;
      return finish(fcav_run_bench(&bench, &fit, common.out.c_str(), &run));
    }
    if (scaling_cmd->parsed()) {
      scaling.method = parse_method_or_throw(scaling_method);
      scaling.n_grid = n_grid.data();
      scaling.n_grid_len = n_grid.size();
      scaling.d_grid = d_grid.data();
      scaling.d_grid_len = d_grid.size();
      scaling.evict_cache = no_evict ? 0 : 1;
      return finish(fcav_run_scaling(&scaling, &fit, common.out.c_str(), &run));
    }
    if (sens_cmd->parsed()) {
      sens.method = parse_method_or_throw(sens_method);
      sens.set_sizes = set_sizes.data();
      sens.set_sizes_len = set_sizes.size();
      sens.random_set_counts = random_set_counts.data();
      sens.random_set_counts_len = random_set_counts.size();
      return finish(fcav_run_sensitivity(&sens, &fit, common.out.c_str(), &run));
    }
    if (track_cmd->parsed()) {
      tracking.method = parse_method_or_throw(track_method);
      return finish(fcav_run_tracking(track_manifest.c_str(), &tracking, &fit, common.out.c_str(), &run));
    }
    if (synth_cmd->parsed()) {
      std::vector<const char*> layer_ptrs;
      for (const auto& l : synth_layers) layer_ptrs.push_back(l.c_str());
      const auto methods = parse_methods(synth_methods);
      const auto reports = parse_methods(report_methods);
      synth.layers = layer_ptrs.data();
      synth.n_layers = layer_ptrs.size();
      synth.methods = methods.data();
      synth.n_methods = methods.size();
      synth.dtype = dtype == "f32" ? FCAV_FLOAT32 : FCAV_FLOAT64;
      synth.write_gradients = p_align >= 0.0 ? 1 : 0;
      synth.gradient_p_align = p_align;
      synth.gradient_class = gradient_class.c_str();
      synth.report_methods = reports.data();
      synth.n_report_methods = reports.size();
      return finish(fcav_run_synth(&synth, common.out.c_str(), &run));
    }
    if (inspect_cmd->parsed()) {
      std::vector<const char*> ptrs;
      for (const auto& p : inspect_paths) ptrs.push_back(p.c_str());
      char* text = nullptr;
      const fcav_status st = fcav_inspect(ptrs.data(), ptrs.size(), &text);
      if (st == FCAV_OK) std::fputs(text, stdout);
      fcav_string_free(text);
      return finish(st);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "fastcav: %s\n", e.message.c_str());
    return kExitUsage;
  }
  return kExitUsage;
}
