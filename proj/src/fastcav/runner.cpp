#include "fastcav/runner.hpp"

#include <fstream>
#include <map>

#include "fastcav/cav_io.hpp"
#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"
#include "fastcav/parallel.hpp"
#include "fastcav/rng.hpp"
#include "fastcav/tensor_io.hpp"

namespace fastcav {

namespace fs = std::filesystem;

namespace {

void stamp(Table& t, const RunOptions& opts, std::uint64_t seed, const std::string& command) {
  t.set_meta("tool", "fastcav");
  t.set_meta("version", FASTCAV_VERSION);
  t.set_meta("command", command);
  t.set_meta("seed", std::to_string(seed));
  t.set_meta("generator_version", std::to_string(kGeneratorVersion));
  if (!opts.command_line.empty()) t.set_meta("argv", opts.command_line);
}

void emit(const Table& t, const fs::path& out, const std::string& name, const RunOptions& opts,
          const std::vector<std::string>& id_columns) {
  t.write_csv(out / (name + ".csv"));
  if (opts.plot_data) t.to_long(id_columns).write_csv(out / (name + "_long.csv"));
}

void log(const RunOptions& opts, const std::string& msg) {
  if (opts.log) opts.log(msg);
}

std::string join_methods(const std::vector<Method>& methods) {
  std::string s;
  for (auto m : methods) {
    if (!s.empty()) s += ';';
    s += method_name(m);
  }
  return s;
}

std::vector<Method> resolve_methods(const std::vector<Method>& requested, const ExperimentManifest& m) {
  if (!requested.empty()) return requested;
  std::vector<Method> out;
  for (const auto& name : m.methods) out.push_back(*parse_method(name));
  if (out.empty()) out.push_back(Method::FastCav);
  return out;
}

std::string opt_num(const std::optional<double>& v) { return v ? fmt_num(*v) : std::string("nan"); }

}  // namespace

void run_fit(const fs::path& manifest_path, const FitRunOptions& fit, const fs::path& out, const RunOptions& opts) {
  fs::create_directories(out);
  fs::remove(out / "FAILED");
  try {
    const ExperimentManifest m = load_manifest(manifest_path);
    const std::uint64_t seed = opts.seed_set ? opts.seed : m.seed;
    const auto methods = resolve_methods(fit.methods, m);
    require(!m.concepts.empty() && !m.random_sets.empty(), ErrorCode::InvalidArgument,
            "manifest needs at least one concept and one random set");
    const std::string epoch = m.has_epochs() ? m.epochs.back() : std::string{};
    if (m.has_epochs()) log(opts, "manifest lists epochs; fitting the last epoch '" + epoch + "'");

    const std::size_t L = m.layers.size(), C = m.concepts.size(), R = m.random_sets.size(),
                      M = methods.size();
    // cavs[l][c][method][r]
    std::vector<std::vector<std::vector<std::vector<Cav>>>> cavs(
        L, std::vector<std::vector<std::vector<Cav>>>(C, std::vector<std::vector<Cav>>(M)));
    std::vector<std::vector<std::vector<std::vector<double>>>> accs(
        L, std::vector<std::vector<std::vector<double>>>(C, std::vector<std::vector<double>>(M)));

    for (std::size_t l = 0; l < L; ++l) {
      const std::string& layer = m.layers[l].name;
      std::vector<RowSplit> randoms;
      for (std::size_t r = 0; r < R; ++r) {
        randoms.push_back(split_rows(read_tensor(m.random_sets[r].path(layer, epoch)), fit.holdout_fraction,
                                     derive_seed(derive_seed(seed, 1000000 + r), l)));
      }
      parallel_for(C, opts.threads, [&](std::size_t c) {
        const auto& concept_set = m.concepts[c];
        const RowSplit cs = split_rows(read_tensor(concept_set.path(layer, epoch)), fit.holdout_fraction,
                                       derive_seed(derive_seed(seed, c), l));
        const fs::path dir = out / "cavs" / layer / concept_set.name;
        fs::create_directories(dir);
        for (std::size_t k = 0; k < M; ++k) {
          for (std::size_t r = 0; r < R; ++r) {
            const ConceptDataset train(cs.train, randoms[r].train, concept_set.name, layer);
            const ConceptDataset eval(cs.eval, randoms[r].eval);
            Cav cav = fit_method(methods[k], train, fit.settings, derive_seed(seed, (c * R + r) * M + k));
            accs[l][c][k].push_back(accuracy(cav, eval));
            save_cav(cav, dir / (std::string(method_name(methods[k])) + "__" + m.random_sets[r].name + ".cavk"));
            cavs[l][c][k].push_back(std::move(cav));
          }
        }
      });
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t k = 0; k < M; ++k) {
          for (const auto& w : cavs[l][c][k].front().meta.warnings) log(opts, "warning: " + w);
        }
      }
    }

    std::vector<std::string> cols{"layer",     "concept",   "method",         "n_random_sets",
                                  "accuracy_mean", "accuracy_std", "time_mean_s", "time_std_s",
                                  "intra_cosine_mean", "intra_cosine_std"};
    if (M >= 2) {
      cols.emplace_back("inter_cosine_reference");
      cols.emplace_back("inter_cosine_mean");
      cols.emplace_back("inter_cosine_std");
    }
    Table summary(cols);
    stamp(summary, opts, seed, "fit");
    summary.set_meta("methods", join_methods(methods));
    summary.set_meta("holdout_fraction", fmt_num(fit.holdout_fraction));
    summary.set_meta("manifest", fs::absolute(manifest_path).string());

    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t k = 0; k < M; ++k) {
          const auto& set = cavs[l][c][k];
          std::vector<double> times;
          for (const auto& cav : set) times.push_back(cav.fit_wall_time);
          const Summary acc = summarize(accs[l][c][k]);
          const Summary tm = summarize(times);
          std::optional<double> intra_mean, intra_std;
          if (set.size() >= 2) {
            const auto sim = pairwise_similarity(set);
            intra_mean = sim.mean;
            intra_std = sim.std;
          }
          std::vector<std::string> row{m.layers[l].name, m.concepts[c].name, std::string(method_name(methods[k])),
                                       std::to_string(R), fmt_num(acc.mean), fmt_num(acc.std), fmt_num(tm.mean),
                                       fmt_num(tm.std), opt_num(intra_mean), opt_num(intra_std)};
          if (M >= 2) {
            std::vector<double> inter;
            for (std::size_t r = 0; r < R; ++r) inter.push_back(cosine_similarity(set[r], cavs[l][c][0][r]));
            const Summary s = summarize(inter);
            row.emplace_back(method_name(methods[0]));
            row.push_back(fmt_num(s.mean));
            row.push_back(fmt_num(s.std));
          }
          summary.add_row(std::move(row));
        }
      }
    }
    emit(summary, out, "summary", opts, {"layer", "concept", "method"});
  } catch (const std::exception& e) {
    std::ofstream marker(out / "FAILED");
    marker << e.what() << '\n';
    throw;
  }
}

void run_tcav(const fs::path& manifest_path, const fs::path& gradients, const TcavRunOptions& tcav,
              const fs::path& out, const RunOptions& opts) {
  require(fs::is_directory(gradients), ErrorCode::MissingFile,
          "gradients directory not found: " + gradients.string());
  const ExperimentManifest m = load_manifest(manifest_path);
  const std::uint64_t seed = opts.seed_set ? opts.seed : m.seed;
  require(m.random_sets.size() >= 2, ErrorCode::InvalidArgument,
          "TCAV significance needs at least two random sets");
  const std::string epoch = m.has_epochs() ? m.epochs.back() : std::string{};

  std::vector<std::string> classes;
  for (const auto& entry : fs::directory_iterator(gradients)) {
    if (entry.is_directory()) classes.push_back(entry.path().filename().string());
  }
  std::sort(classes.begin(), classes.end());
  require(!classes.empty(), ErrorCode::MissingFile,
          "no class subdirectories under " + gradients.string());
  fs::create_directories(out);

  Table results({"concept", "layer", "class", "mean", "std", "p_value", "significant"});
  stamp(results, opts, seed, "tcav");
  results.set_meta("alpha", fmt_num(tcav.alpha));
  results.set_meta("correction", fmt_num(tcav.correction));
  results.set_meta("test", "welch-two-sided");
  results.set_meta("method", std::string(method_name(tcav.method)));
  Table scores({"concept", "layer", "class", "kind", "index", "score"});
  stamp(scores, opts, seed, "tcav");

  const std::size_t R = m.random_sets.size();
  std::size_t matched = 0;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const std::string& layer = m.layers[l].name;
    std::vector<GradientBatch> batches;
    for (const auto& cls : classes) {
      const fs::path p = gradients / cls / (layer + ".cavk");
      if (!fs::exists(p)) continue;
      batches.push_back(GradientBatch{read_tensor(p), layer, cls});
      require(batches.back().grads.cols() == m.layers[l].dim, ErrorCode::DimensionMismatch,
              p.string() + " does not match layer width " + std::to_string(m.layers[l].dim));
    }
    if (batches.empty()) {
      log(opts, "warning: no gradients for layer '" + layer + "'");
      continue;
    }
    matched += batches.size();

    std::vector<ActivationMatrix> randoms;
    for (const auto& r : m.random_sets) randoms.push_back(read_tensor(r.path(layer, epoch)));
    std::vector<Cav> random_cavs(R);
    parallel_for(R, opts.threads, [&](std::size_t r) {
      const ConceptDataset ds(randoms[r], randoms[(r + 1) % R], "random", layer);
      random_cavs[r] = fit_method(tcav.method, ds, tcav.settings, derive_seed(seed, 500000 + l * R + r));
    });

    for (std::size_t c = 0; c < m.concepts.size(); ++c) {
      const auto acts = read_tensor(m.concepts[c].path(layer, epoch));
      std::vector<Cav> concept_cavs(R);
      parallel_for(R, opts.threads, [&](std::size_t r) {
        const ConceptDataset ds(acts, randoms[r], m.concepts[c].name, layer);
        concept_cavs[r] = fit_method(tcav.method, ds, tcav.settings, derive_seed(seed, (l * 7919 + c) * R + r));
      });
      for (const auto& batch : batches) {
        const TcavResult res = tcav_with_significance(concept_cavs, random_cavs, batch, tcav.alpha, tcav.correction);
        results.add_row({m.concepts[c].name, layer, batch.class_name, fmt_num(res.mean), fmt_num(res.std),
                         fmt_num(res.p_value), fmt_bool(res.significant)});
        for (std::size_t i = 0; i < res.scores.size(); ++i) {
          scores.add_row({m.concepts[c].name, layer, batch.class_name, "concept", std::to_string(i),
                          fmt_num(res.scores[i])});
        }
        for (std::size_t i = 0; i < res.random_scores.size(); ++i) {
          scores.add_row({m.concepts[c].name, layer, batch.class_name, "random", std::to_string(i),
                          fmt_num(res.random_scores[i])});
        }
      }
    }
  }
  require(matched > 0, ErrorCode::MissingFile, "no gradient file matches any manifest layer");
  emit(results, out, "tcav", opts, {"concept", "layer", "class"});
  scores.write_csv(out / "tcav_scores.csv");
}

void run_bench(const BenchRunOptions& bench, const fs::path& out, const RunOptions& opts) {
  require(!bench.methods.empty(), ErrorCode::InvalidArgument, "no methods to benchmark");
  fs::create_directories(out);
  std::uint64_t seed = opts.seed;
  ConceptDataset ds = [&] {
    if (bench.manifest) {
      const auto m = load_manifest(*bench.manifest);
      if (!opts.seed_set) seed = m.seed;
      require(!m.concepts.empty() && !m.random_sets.empty(), ErrorCode::InvalidArgument,
              "manifest needs a concept and a random set");
      const std::string epoch = m.has_epochs() ? m.epochs.back() : std::string{};
      const auto& layer = m.layers.front().name;
      return ConceptDataset(read_tensor(m.concepts.front().path(layer, epoch)),
                            read_tensor(m.random_sets.front().path(layer, epoch)), m.concepts.front().name, layer);
    }
    require(bench.n >= 2 && bench.d >= 1, ErrorCode::InvalidArgument, "bench needs n >= 2 and d >= 1");
    return make_concept_task(axis_vector(bench.d, 0, 3.0), std::vector<double>(bench.d, 0.0),
                             Covariance::isotropic(1.0), bench.n / 2, seed);
  }();

  Table t({"method", "n", "d", "repeats", "mean_s", "std_s", "min_s", "speedup_vs_reference", "p_value"});
  stamp(t, opts, seed, "bench");
  t.set_meta("reference", std::string(method_name(bench.methods.front())));
  t.set_meta("cache_eviction", fmt_bool(bench.timing.evict_cache));
  std::vector<TimingRecord> records;
  for (auto method : bench.methods) {
    records.push_back(time_fit(timed_method(method, bench.settings, seed), ds, bench.repeats, bench.timing));
    log(opts, std::string(method_name(method)) + ": mean " + fmt_num(records.back().mean) + " s");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto cmp = compare_timings(records.front(), records[i]);
    const auto& r = records[i];
    t.add_row({r.method, fmt_num(r.n), fmt_num(r.d), std::to_string(r.repeats), fmt_num(r.mean), fmt_num(r.std),
               fmt_num(r.min), fmt_num(cmp.ratio), i == 0 ? std::string("nan") : fmt_num(cmp.welch.p_value)});
  }
  emit(t, out, "bench", opts, {"method"});
}

void run_scaling(Method method, const ScalingParams& params, const fs::path& out, const RunOptions& opts,
                 const FitSettings& settings) {
  fs::create_directories(out);
  ScalingParams p = params;
  p.seed = opts.seed;
  const auto result = scaling_study(timed_method(method, settings, p.seed), p);
  Table table = result.table;
  stamp(table, opts, p.seed, "scaling");
  emit(table, out, "scaling", opts, {"axis", "method", "n", "d"});

  Table slopes({"axis", "slope", "std_error", "ci95_low", "ci95_high"});
  stamp(slopes, opts, p.seed, "scaling");
  for (const auto& [axis, fit] : {std::pair{"n", result.n_slope}, std::pair{"d", result.d_slope}}) {
    slopes.add_row({axis, fmt_num(fit.slope), fmt_num(fit.std_error), fmt_num(fit.ci_low), fmt_num(fit.ci_high)});
  }
  slopes.write_csv(out / "slopes.csv");
  log(opts, "slope_n " + fmt_num(result.n_slope.slope) + ", slope_d " + fmt_num(result.d_slope.slope));
}

void run_sensitivity(const SensitivityParams& params, const fs::path& out, const RunOptions& opts) {
  fs::create_directories(out);
  SensitivityParams p = params;
  p.seed = opts.seed;
  p.threads = opts.threads;
  auto result = sensitivity_study(p);
  stamp(result.by_set_size, opts, p.seed, "sensitivity");
  stamp(result.by_random_sets, opts, p.seed, "sensitivity");
  emit(result.by_set_size, out, "sensitivity_set_size", opts, {"set_size"});
  emit(result.by_random_sets, out, "sensitivity_random_sets", opts, {"n_random_sets"});
}

void run_tracking(const fs::path& manifest_path, const TrackingParams& params, const fs::path& out,
                  const RunOptions& opts) {
  fs::create_directories(out);
  ExperimentManifest m = load_manifest(manifest_path);
  if (opts.seed_set) m.seed = opts.seed;
  TrackingParams p = params;
  p.threads = opts.threads;
  const TrackingGrid g = tracking_study(m, p);

  Table acc = g.accuracy_table();
  Table auc = g.auc_table();
  Table learned = g.learned_table();
  for (Table* t : {&acc, &auc, &learned}) {
    stamp(*t, opts, m.seed, "tracking");
    t->set_meta("method", std::string(method_name(p.method)));
    t->set_meta("learned_threshold", fmt_num(p.learned_threshold));
  }
  emit(acc, out, "tracking_accuracy", opts, {"epoch", "layer", "concept"});
  emit(auc, out, "tracking_auc", opts, {"layer", "rank", "concept"});
  emit(learned, out, "tracking_learned", opts, {"epoch", "layer"});
}

void run_synth(const SynthRunOptions& synth, const fs::path& out, const RunOptions& opts) {
  FixtureParams fp = synth.fixture;
  fp.seed = opts.seed;
  const auto m = write_fixture(out, fp);
  log(opts, "wrote " + (out / "manifest.json").string() + " (" + std::to_string(m.concepts.size()) + " concepts, " +
                std::to_string(m.random_sets.size()) + " random sets)");
  if (synth.gradient_p_align) {
    write_planted_gradients(out / "gradients", fp, synth.gradient_class, *synth.gradient_p_align,
                            synth.gradient_rows, derive_seed(fp.seed, 777));
  }
  if (!synth.report_methods.empty()) {
    TaskParams task;
    task.mu_c = axis_vector(fp.d, 0, fp.separation * fp.sigma);
    task.mu_r.assign(fp.d, 0.0);
    task.covariance = Covariance::isotropic(fp.sigma);
    task.n_per_class = fp.n_per_set;
    Table report = equivalence_report(task, synth.report_methods, synth.report_trials, fp.seed);
    stamp(report, opts, fp.seed, "synth");
    emit(report, out, "equivalence", opts, {"method"});
  }
}

std::vector<std::string> inspect(const std::vector<fs::path>& paths) {
  std::vector<fs::path> tensors;
  for (const auto& p : paths) {
    if (p.extension() == ".json") {
      const auto m = load_manifest(p);
      for (const auto* sets : {&m.concepts, &m.random_sets}) {
        for (const auto& s : *sets) {
          for (const auto& [key, file] : s.files) tensors.push_back(file);
        }
      }
    } else {
      tensors.push_back(p);
    }
  }
  std::vector<std::string> lines;
  for (const auto& p : tensors) {
    const TensorHeader h = read_tensor_header(p);
    (void)read_tensor(p);  // full decode: rejects NaN / Inf
    std::string shape;
    for (std::size_t i = 0; i < h.shape.size(); ++i) shape += (i ? ", " : "") + std::to_string(h.shape[i]);
    lines.push_back(p.string() + ": CAVK v" + std::to_string(h.version) + " " +
                    (h.dtype == Dtype::Float32 ? "float32" : "float64") + " rank " + std::to_string(h.rank) +
                    " shape (" + shape + ") payload " + std::to_string(h.payload_bytes()) + " bytes, finite");
  }
  return lines;
}

}  // namespace fastcav
