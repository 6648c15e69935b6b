#include "fastcav/fastcav.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "fastcav/baselines.hpp"
#include "fastcav/cav_io.hpp"
#include "fastcav/error.hpp"
#include "fastcav/fit.hpp"
#include "fastcav/runner.hpp"
#include "fastcav/tcav.hpp"
#include "fastcav/tensor_io.hpp"

struct fcav_matrix {
  fastcav::ActivationMatrix m;
};

struct fcav_cav {
  fastcav::Cav cav;
};

namespace {

thread_local std::string last_error;

fcav_status to_status(fastcav::ErrorCode code) {
  using fastcav::ErrorCode;
  switch (code) {
    case ErrorCode::Io: return FCAV_ERR_IO;
    case ErrorCode::BadMagic: return FCAV_ERR_BAD_MAGIC;
    case ErrorCode::UnsupportedVersion: return FCAV_ERR_UNSUPPORTED_VERSION;
    case ErrorCode::UnsupportedDtype: return FCAV_ERR_UNSUPPORTED_DTYPE;
    case ErrorCode::BadRank: return FCAV_ERR_BAD_RANK;
    case ErrorCode::ShapeMismatch: return FCAV_ERR_SHAPE_MISMATCH;
    case ErrorCode::NonFinite: return FCAV_ERR_NON_FINITE;
    case ErrorCode::Overflow: return FCAV_ERR_OVERFLOW;
    case ErrorCode::ManifestFormat: return FCAV_ERR_MANIFEST_FORMAT;
    case ErrorCode::MissingFile: return FCAV_ERR_MISSING_FILE;
    case ErrorCode::DimensionMismatch: return FCAV_ERR_DIMENSION_MISMATCH;
    case ErrorCode::DuplicateName: return FCAV_ERR_DUPLICATE_NAME;
    case ErrorCode::ZeroDirection: return FCAV_ERR_ZERO_DIRECTION;
    case ErrorCode::SingularCovariance: return FCAV_ERR_SINGULAR_COVARIANCE;
    case ErrorCode::NotPositiveDefinite: return FCAV_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::InvalidArgument: return FCAV_ERR_INVALID_ARGUMENT;
    case ErrorCode::WrongMethod: return FCAV_ERR_WRONG_METHOD;
    case ErrorCode::EmptyInput: return FCAV_ERR_EMPTY_INPUT;
    case ErrorCode::ParallelRefused: return FCAV_ERR_PARALLEL_REFUSED;
    case ErrorCode::DegenerateGrid: return FCAV_ERR_DEGENERATE_GRID;
    case ErrorCode::Usage: return FCAV_ERR_USAGE;
  }
  return FCAV_ERR_INTERNAL;
}

template <class F>
fcav_status guarded(F&& body) noexcept {
  try {
    body();
    return FCAV_OK;
  } catch (const fastcav::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FCAV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FCAV_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return FCAV_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fastcav::fail(fastcav::ErrorCode::Usage, std::string(what) + " must not be NULL");
}

fastcav::Method to_method(fcav_method m) {
  switch (m) {
    case FCAV_METHOD_FASTCAV: return fastcav::Method::FastCav;
    case FCAV_METHOD_SVM_SGD: return fastcav::Method::SvmSgd;
    case FCAV_METHOD_LDA: return fastcav::Method::Lda;
    case FCAV_METHOD_RIDGE: return fastcav::Method::Ridge;
    case FCAV_METHOD_LOGREG: return fastcav::Method::LogReg;
    case FCAV_METHOD_SPARSE_LOGREG: return fastcav::Method::SparseLogReg;
  }
  fastcav::fail(fastcav::ErrorCode::Usage, "unknown method value " + std::to_string(static_cast<int>(m)));
}

fcav_method from_method(fastcav::Method m) {
  switch (m) {
    case fastcav::Method::FastCav: return FCAV_METHOD_FASTCAV;
    case fastcav::Method::SvmSgd: return FCAV_METHOD_SVM_SGD;
    case fastcav::Method::Lda: return FCAV_METHOD_LDA;
    case fastcav::Method::Ridge: return FCAV_METHOD_RIDGE;
    case fastcav::Method::LogReg: return FCAV_METHOD_LOGREG;
    case fastcav::Method::SparseLogReg: return FCAV_METHOD_SPARSE_LOGREG;
  }
  return FCAV_METHOD_FASTCAV;
}

std::vector<fastcav::Method> to_methods(const fcav_method* methods, std::size_t n) {
  if (n > 0) need(methods, "methods");
  std::vector<fastcav::Method> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(to_method(methods[i]));
  return out;
}

fastcav::Dtype to_dtype(fcav_dtype d) {
  if (d == FCAV_FLOAT32) return fastcav::Dtype::Float32;
  if (d == FCAV_FLOAT64) return fastcav::Dtype::Float64;
  fastcav::fail(fastcav::ErrorCode::Usage, "unknown dtype value " + std::to_string(static_cast<int>(d)));
}

template <class T>
std::vector<T> to_vector(const T* data, std::size_t n, const char* what) {
  if (n > 0) need(data, what);
  return n > 0 ? std::vector<T>(data, data + n) : std::vector<T>{};
}

fastcav::FitSettings to_settings(const fcav_fit_options* opts) {
  fcav_fit_options o;
  fcav_fit_options_default(&o);
  if (opts != nullptr) o = *opts;
  fastcav::FitSettings s;
  s.fastcav.threads = o.threads == 0 ? 1 : o.threads;
  s.sgd.max_epochs = o.sgd_max_epochs;
  s.sgd.schedule.kind = o.sgd_constant_rate ? fastcav::LearningRate::Kind::Constant
                                            : fastcav::LearningRate::Kind::InvScaling;
  s.sgd.schedule.eta0 = o.sgd_eta0;
  s.sgd.schedule.power = o.sgd_power;
  s.sgd.lambda = o.sgd_lambda;
  s.sgd.tolerance = o.sgd_tolerance;
  s.sgd.patience = o.sgd_patience;
  s.lda.ridge = o.lda_ridge;
  switch (o.lda_solver) {
    case FCAV_LDA_DIRECT: s.lda.solver = fastcav::LdaConfig::Solver::DirectSolve; break;
    case FCAV_LDA_PSEUDO_INVERSE: s.lda.solver = fastcav::LdaConfig::Solver::PseudoInverse; break;
    case FCAV_LDA_AUTO: s.lda.solver = fastcav::LdaConfig::Solver::Auto; break;
    default: fastcav::fail(fastcav::ErrorCode::Usage, "unknown LDA solver value");
  }
  s.ridge_lambda = o.ridge_lambda;
  s.logreg_lambda = o.logreg_lambda;
  s.sparse_lambda1 = o.sparse_lambda1;
  s.logreg_epochs = o.logreg_epochs;
  return s;
}

fastcav::RunOptions to_run(const fcav_run_options* run) {
  fcav_run_options o;
  fcav_run_options_default(&o);
  if (run != nullptr) o = *run;
  fastcav::RunOptions r;
  r.seed = o.seed;
  r.seed_set = o.seed_set != 0;
  r.threads = o.threads == 0 ? 1 : o.threads;
  r.plot_data = o.plot_data != 0;
  if (o.command_line != nullptr) r.command_line = o.command_line;
  if (o.log != nullptr) {
    const fcav_log_fn fn = o.log;
    void* user = o.log_user;
    r.log = [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
  }
  return r;
}

fastcav::ConceptDataset dataset(const fcav_matrix* c, const fcav_matrix* r) {
  need(c, "concept activations");
  need(r, "random activations");
  return fastcav::ConceptDataset(c->m, r->m);
}

}  // namespace

extern "C" {

const char* fcav_version(void) { return FASTCAV_VERSION; }

const char* fcav_status_string(fcav_status status) {
  switch (status) {
    case FCAV_OK: return "ok";
    case FCAV_ERR_IO: return fastcav::to_string(fastcav::ErrorCode::Io);
    case FCAV_ERR_BAD_MAGIC: return fastcav::to_string(fastcav::ErrorCode::BadMagic);
    case FCAV_ERR_UNSUPPORTED_VERSION: return fastcav::to_string(fastcav::ErrorCode::UnsupportedVersion);
    case FCAV_ERR_UNSUPPORTED_DTYPE: return fastcav::to_string(fastcav::ErrorCode::UnsupportedDtype);
    case FCAV_ERR_BAD_RANK: return fastcav::to_string(fastcav::ErrorCode::BadRank);
    case FCAV_ERR_SHAPE_MISMATCH: return fastcav::to_string(fastcav::ErrorCode::ShapeMismatch);
    case FCAV_ERR_NON_FINITE: return fastcav::to_string(fastcav::ErrorCode::NonFinite);
    case FCAV_ERR_OVERFLOW: return fastcav::to_string(fastcav::ErrorCode::Overflow);
    case FCAV_ERR_MANIFEST_FORMAT: return fastcav::to_string(fastcav::ErrorCode::ManifestFormat);
    case FCAV_ERR_MISSING_FILE: return fastcav::to_string(fastcav::ErrorCode::MissingFile);
    case FCAV_ERR_DIMENSION_MISMATCH: return fastcav::to_string(fastcav::ErrorCode::DimensionMismatch);
    case FCAV_ERR_DUPLICATE_NAME: return fastcav::to_string(fastcav::ErrorCode::DuplicateName);
    case FCAV_ERR_ZERO_DIRECTION: return fastcav::to_string(fastcav::ErrorCode::ZeroDirection);
    case FCAV_ERR_SINGULAR_COVARIANCE: return fastcav::to_string(fastcav::ErrorCode::SingularCovariance);
    case FCAV_ERR_NOT_POSITIVE_DEFINITE: return fastcav::to_string(fastcav::ErrorCode::NotPositiveDefinite);
    case FCAV_ERR_INVALID_ARGUMENT: return fastcav::to_string(fastcav::ErrorCode::InvalidArgument);
    case FCAV_ERR_WRONG_METHOD: return fastcav::to_string(fastcav::ErrorCode::WrongMethod);
    case FCAV_ERR_EMPTY_INPUT: return fastcav::to_string(fastcav::ErrorCode::EmptyInput);
    case FCAV_ERR_PARALLEL_REFUSED: return fastcav::to_string(fastcav::ErrorCode::ParallelRefused);
    case FCAV_ERR_DEGENERATE_GRID: return fastcav::to_string(fastcav::ErrorCode::DegenerateGrid);
    case FCAV_ERR_USAGE: return fastcav::to_string(fastcav::ErrorCode::Usage);
    case FCAV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fcav_last_error(void) { return last_error.c_str(); }

const char* fcav_method_name(fcav_method method) {
  switch (method) {
    case FCAV_METHOD_FASTCAV: return "fastcav";
    case FCAV_METHOD_SVM_SGD: return "svm";
    case FCAV_METHOD_LDA: return "lda";
    case FCAV_METHOD_RIDGE: return "ridge";
    case FCAV_METHOD_LOGREG: return "logreg";
    case FCAV_METHOD_SPARSE_LOGREG: return "sparse_logreg";
  }
  return "unknown";
}

fcav_status fcav_method_parse(const char* name, fcav_method* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto m = fastcav::parse_method(name);
    if (!m) fastcav::fail(fastcav::ErrorCode::Usage, std::string("unknown method '") + name + "'");
    *out = from_method(*m);
  });
}

fcav_status fcav_matrix_create(size_t rows, size_t cols, const double* values, fcav_matrix** out) {
  return guarded([&] {
    need(out, "out");
    need(values, "values");
    std::vector<double> v(values, values + rows * cols);
    *out = new fcav_matrix{fastcav::ActivationMatrix(rows, cols, std::move(v))};
  });
}

fcav_status fcav_matrix_read(const char* path, fcav_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fcav_matrix{fastcav::read_tensor(path)};
  });
}

fcav_status fcav_matrix_write(const fcav_matrix* m, fcav_dtype dtype, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    fastcav::write_tensor(m->m, to_dtype(dtype), path);
  });
}

void fcav_matrix_free(fcav_matrix* m) { delete m; }
size_t fcav_matrix_rows(const fcav_matrix* m) { return m ? m->m.rows() : 0; }
size_t fcav_matrix_cols(const fcav_matrix* m) { return m ? m->m.cols() : 0; }
const double* fcav_matrix_data(const fcav_matrix* m) { return m ? m->m.values().data() : nullptr; }

void fcav_fit_options_default(fcav_fit_options* opts) {
  if (opts == nullptr) return;
  const fastcav::FitSettings s;
  opts->threads = s.fastcav.threads;
  opts->sgd_max_epochs = s.sgd.max_epochs;
  opts->sgd_constant_rate = s.sgd.schedule.kind == fastcav::LearningRate::Kind::Constant;
  opts->sgd_eta0 = s.sgd.schedule.eta0;
  opts->sgd_power = s.sgd.schedule.power;
  opts->sgd_lambda = s.sgd.lambda;
  opts->sgd_tolerance = s.sgd.tolerance;
  opts->sgd_patience = s.sgd.patience;
  opts->lda_ridge = s.lda.ridge;
  opts->lda_solver = FCAV_LDA_AUTO;
  opts->ridge_lambda = s.ridge_lambda;
  opts->logreg_lambda = s.logreg_lambda;
  opts->sparse_lambda1 = s.sparse_lambda1;
  opts->logreg_epochs = s.logreg_epochs;
}

fcav_status fcav_fit(fcav_method method, const fcav_matrix* concept_acts, const fcav_matrix* random_acts,
                     const fcav_fit_options* opts, uint64_t seed, fcav_cav** out) {
  return guarded([&] {
    need(out, "out");
    const auto m = to_method(method);
    const auto settings = to_settings(opts);
    *out = new fcav_cav{fastcav::fit_method(m, dataset(concept_acts, random_acts), settings, seed)};
  });
}

void fcav_cav_free(fcav_cav* cav) { delete cav; }
size_t fcav_cav_dim(const fcav_cav* cav) { return cav ? cav->cav.dim() : 0; }
const double* fcav_cav_direction(const fcav_cav* cav) { return cav ? cav->cav.direction.data() : nullptr; }
double fcav_cav_intercept(const fcav_cav* cav) { return cav ? cav->cav.intercept : 0.0; }
fcav_method fcav_cav_method(const fcav_cav* cav) { return cav ? from_method(cav->cav.method) : FCAV_METHOD_FASTCAV; }
double fcav_cav_fit_time(const fcav_cav* cav) { return cav ? cav->cav.fit_wall_time : 0.0; }
uint32_t fcav_cav_iterations(const fcav_cav* cav) { return cav ? cav->cav.meta.iterations : 0; }

fcav_status fcav_cav_score(const fcav_cav* cav, const double* x, size_t dim, double* out) {
  return guarded([&] {
    need(cav, "cav");
    need(x, "x");
    need(out, "out");
    *out = fastcav::score(cav->cav, std::span<const double>(x, dim));
  });
}

fcav_status fcav_cav_accuracy(const fcav_cav* cav, const fcav_matrix* concept_acts, const fcav_matrix* random_acts,
                              double* out) {
  return guarded([&] {
    need(cav, "cav");
    need(out, "out");
    *out = fastcav::accuracy(cav->cav, dataset(concept_acts, random_acts));
  });
}

fcav_status fcav_cav_cosine(const fcav_cav* a, const fcav_cav* b, double* out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = fastcav::cosine_similarity(a->cav, b->cav);
  });
}

fcav_status fcav_cav_support_ratio(const fcav_cav* cav, const fcav_matrix* concept_acts,
                                   const fcav_matrix* random_acts, double* concept_ratio, double* random_ratio) {
  return guarded([&] {
    need(cav, "cav");
    const auto r = fastcav::support_vector_ratio(cav->cav, dataset(concept_acts, random_acts));
    if (concept_ratio) *concept_ratio = r.concept_ratio;
    if (random_ratio) *random_ratio = r.random_ratio;
  });
}

fcav_status fcav_cav_save(const fcav_cav* cav, const char* path) {
  return guarded([&] {
    need(cav, "cav");
    need(path, "path");
    fastcav::save_cav(cav->cav, path);
  });
}

fcav_status fcav_cav_load(const char* path, fcav_cav** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fcav_cav{fastcav::load_cav(path)};
  });
}

fcav_status fcav_tcav_score(const fcav_cav* cav, const fcav_matrix* grads, double* out) {
  return guarded([&] {
    need(cav, "cav");
    need(grads, "grads");
    need(out, "out");
    *out = fastcav::tcav_score(cav->cav, fastcav::GradientBatch{grads->m, {}, {}});
  });
}

void fcav_run_options_default(fcav_run_options* opts) {
  if (opts == nullptr) return;
  *opts = fcav_run_options{fastcav::kDefaultSeed, 0, 1, 0, nullptr, nullptr, nullptr};
}

fcav_status fcav_run_fit(const char* manifest, const fcav_method* methods, size_t n_methods, double holdout_fraction,
                         const fcav_fit_options* fit, const char* out_dir, const fcav_run_options* run) {
  return guarded([&] {
    need(manifest, "manifest");
    need(out_dir, "out_dir");
    fastcav::FitRunOptions f;
    f.methods = to_methods(methods, n_methods);
    f.holdout_fraction = holdout_fraction;
    f.settings = to_settings(fit);
    fastcav::run_fit(manifest, f, out_dir, to_run(run));
  });
}

fcav_status fcav_run_tcav(const char* manifest, const char* gradients_dir, fcav_method method, double alpha,
                          double correction, const fcav_fit_options* fit, const char* out_dir,
                          const fcav_run_options* run) {
  return guarded([&] {
    need(manifest, "manifest");
    need(gradients_dir, "gradients_dir");
    need(out_dir, "out_dir");
    fastcav::TcavRunOptions t;
    t.alpha = alpha;
    t.correction = correction;
    t.method = to_method(method);
    t.settings = to_settings(fit);
    fastcav::run_tcav(manifest, gradients_dir, t, out_dir, to_run(run));
  });
}

void fcav_bench_options_default(fcav_bench_options* opts) {
  if (opts == nullptr) return;
  const fastcav::BenchRunOptions b;
  *opts = fcav_bench_options{nullptr, 0, b.n, b.d, b.repeats, nullptr, b.timing.evict_cache ? 1 : 0};
}

fcav_status fcav_run_bench(const fcav_bench_options* bench, const fcav_fit_options* fit, const char* out_dir,
                           const fcav_run_options* run) {
  return guarded([&] {
    need(bench, "bench");
    need(out_dir, "out_dir");
    fastcav::BenchRunOptions b;
    if (bench->n_methods > 0) b.methods = to_methods(bench->methods, bench->n_methods);
    b.n = bench->n;
    b.d = bench->d;
    b.repeats = bench->repeats;
    if (bench->manifest != nullptr) b.manifest = bench->manifest;
    b.settings = to_settings(fit);
    b.timing.evict_cache = bench->evict_cache != 0;
    fastcav::run_bench(b, out_dir, to_run(run));
  });
}

void fcav_scaling_options_default(fcav_scaling_options* opts) {
  if (opts == nullptr) return;
  const fastcav::ScalingParams p;
  *opts = fcav_scaling_options{FCAV_METHOD_FASTCAV, nullptr, 0, nullptr, 0, p.n_fixed, p.d_fixed,
                               p.repeats, p.separation, p.timing.evict_cache ? 1 : 0};
}

fcav_status fcav_run_scaling(const fcav_scaling_options* scaling, const fcav_fit_options* fit, const char* out_dir,
                             const fcav_run_options* run) {
  return guarded([&] {
    need(scaling, "scaling");
    need(out_dir, "out_dir");
    fastcav::ScalingParams p;
    if (scaling->n_grid_len > 0) p.n_grid = to_vector(scaling->n_grid, scaling->n_grid_len, "n_grid");
    if (scaling->d_grid_len > 0) p.d_grid = to_vector(scaling->d_grid, scaling->d_grid_len, "d_grid");
    p.n_fixed = scaling->n_fixed;
    p.d_fixed = scaling->d_fixed;
    p.repeats = scaling->repeats;
    p.separation = scaling->separation;
    p.timing.evict_cache = scaling->evict_cache != 0;
    const auto method = to_method(scaling->method);
    fastcav::run_scaling(method, p, out_dir, to_run(run), to_settings(fit));
  });
}

void fcav_sensitivity_options_default(fcav_sensitivity_options* opts) {
  if (opts == nullptr) return;
  const fastcav::SensitivityParams p;
  *opts = fcav_sensitivity_options{FCAV_METHOD_FASTCAV, p.d, p.separation, p.sigma, nullptr, 0, nullptr, 0,
                                   p.random_sets_for_size_panel, p.set_size_for_count_panel, p.n_eval_per_class,
                                   p.seeds};
}

fcav_status fcav_run_sensitivity(const fcav_sensitivity_options* sens, const fcav_fit_options* fit,
                                 const char* out_dir, const fcav_run_options* run) {
  return guarded([&] {
    need(sens, "sensitivity");
    need(out_dir, "out_dir");
    fastcav::SensitivityParams p;
    p.method = to_method(sens->method);
    p.d = sens->d;
    p.separation = sens->separation;
    p.sigma = sens->sigma;
    if (sens->set_sizes_len > 0) p.set_sizes = to_vector(sens->set_sizes, sens->set_sizes_len, "set_sizes");
    if (sens->random_set_counts_len > 0) {
      p.random_set_counts = to_vector(sens->random_set_counts, sens->random_set_counts_len, "random_set_counts");
    }
    p.random_sets_for_size_panel = sens->random_sets_for_size_panel;
    p.set_size_for_count_panel = sens->set_size_for_count_panel;
    p.n_eval_per_class = sens->n_eval_per_class;
    p.seeds = sens->seeds;
    p.settings = to_settings(fit);
    fastcav::run_sensitivity(p, out_dir, to_run(run));
  });
}

void fcav_tracking_options_default(fcav_tracking_options* opts) {
  if (opts == nullptr) return;
  const fastcav::TrackingParams p;
  *opts = fcav_tracking_options{FCAV_METHOD_FASTCAV, p.learned_threshold, p.holdout_fraction};
}

fcav_status fcav_run_tracking(const char* manifest, const fcav_tracking_options* tracking,
                              const fcav_fit_options* fit, const char* out_dir, const fcav_run_options* run) {
  return guarded([&] {
    need(manifest, "manifest");
    need(tracking, "tracking");
    need(out_dir, "out_dir");
    fastcav::TrackingParams p;
    p.method = to_method(tracking->method);
    p.learned_threshold = tracking->learned_threshold;
    p.holdout_fraction = tracking->holdout_fraction;
    p.settings = to_settings(fit);
    fastcav::run_tracking(manifest, p, out_dir, to_run(run));
  });
}

void fcav_synth_options_default(fcav_synth_options* opts) {
  if (opts == nullptr) return;
  const fastcav::FixtureParams f;
  const fastcav::SynthRunOptions s;
  *opts = fcav_synth_options{f.d, f.sigma, f.separation, f.n_per_set, f.n_concepts, f.n_random_sets,
                             nullptr, 0, f.epochs, f.epoch_step, nullptr, 0, FCAV_FLOAT64,
                             0, 1.0, nullptr, s.gradient_rows, nullptr, 0, s.report_trials};
}

fcav_status fcav_run_synth(const fcav_synth_options* synth, const char* out_dir, const fcav_run_options* run) {
  return guarded([&] {
    need(synth, "synth");
    need(out_dir, "out_dir");
    fastcav::SynthRunOptions s;
    auto& f = s.fixture;
    f.d = synth->d;
    f.sigma = synth->sigma;
    f.separation = synth->separation;
    f.n_per_set = synth->n_per_set;
    f.n_concepts = synth->n_concepts;
    f.n_random_sets = synth->n_random_sets;
    if (synth->n_layers > 0) {
      need(synth->layers, "layers");
      f.layers.clear();
      for (std::size_t i = 0; i < synth->n_layers; ++i) {
        need(synth->layers[i], "layer name");
        f.layers.emplace_back(synth->layers[i]);
      }
    }
    f.epochs = synth->epochs;
    f.epoch_step = synth->epoch_step;
    if (synth->n_methods > 0) {
      f.methods.clear();
      for (auto m : to_methods(synth->methods, synth->n_methods)) f.methods.emplace_back(fastcav::method_name(m));
    }
    f.dtype = to_dtype(synth->dtype);
    if (synth->write_gradients) s.gradient_p_align = synth->gradient_p_align;
    if (synth->gradient_class != nullptr) s.gradient_class = synth->gradient_class;
    s.gradient_rows = synth->gradient_rows;
    s.report_methods = to_methods(synth->report_methods, synth->n_report_methods);
    s.report_trials = synth->report_trials;
    fastcav::run_synth(s, out_dir, to_run(run));
  });
}

fcav_status fcav_inspect(const char* const* paths, size_t n_paths, char** out) {
  return guarded([&] {
    need(out, "out");
    if (n_paths > 0) need(paths, "paths");
    std::vector<std::filesystem::path> ps;
    for (std::size_t i = 0; i < n_paths; ++i) {
      need(paths[i], "path");
      ps.emplace_back(paths[i]);
    }
    std::string text;
    for (const auto& line : fastcav::inspect(ps)) text += line + '\n';
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void fcav_string_free(char* s) { std::free(s); }

}  // extern "C"
