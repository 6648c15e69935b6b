#include "fastcav/synth.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "fastcav/baselines.hpp"
#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"
#include "fastcav/rng.hpp"

namespace fastcav {

namespace fs = std::filesystem;

Covariance Covariance::isotropic(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument,
          "isotropic sigma must be positive");
  Covariance c;
  c.kind_ = Kind::Isotropic;
  c.sigma_ = sigma;
  return c;
}

Covariance Covariance::diagonal(std::vector<double> variances) {
  require(!variances.empty(), ErrorCode::InvalidArgument, "empty diagonal covariance");
  for (double v : variances) {
    require(v > 0.0 && std::isfinite(v), ErrorCode::InvalidArgument, "diagonal variances must be positive");
  }
  Covariance c;
  c.kind_ = Kind::Diagonal;
  c.dim_ = variances.size();
  c.values_ = std::move(variances);
  return c;
}

Covariance Covariance::full(std::vector<double> matrix, std::size_t d) {
  require(d >= 1 && matrix.size() == d * d, ErrorCode::InvalidArgument, "full covariance must be d x d");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double a = matrix[i * d + j];
      const double b = matrix[j * d + i];
      require(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)), ErrorCode::NotPositiveDefinite,
              "covariance is not symmetric");
    }
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto di = static_cast<Eigen::Index>(d);
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::Map<const RowMat>(matrix.data(), di, di));
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "covariance is not positive definite");
  Covariance c;
  c.kind_ = Kind::Full;
  c.dim_ = d;
  c.values_ = std::move(matrix);
  RowMat l = llt.matrixL();
  c.factor_.assign(l.data(), l.data() + l.size());
  return c;
}

void Covariance::check_dim(std::size_t d) const {
  if (kind_ == Kind::Isotropic) return;
  require(d == dim_, ErrorCode::DimensionMismatch,
          "covariance is " + std::to_string(dim_) + "-dimensional, mean is " + std::to_string(d));
}

std::vector<double> Covariance::solve(std::span<const double> v) const {
  check_dim(v.size());
  std::vector<double> out(v.begin(), v.end());
  switch (kind_) {
    case Kind::Isotropic:
      scale(1.0 / (sigma_ * sigma_), out);
      break;
    case Kind::Diagonal:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] /= values_[i];
      break;
    case Kind::Full: {
      using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
      const auto di = static_cast<Eigen::Index>(dim_);
      const Eigen::VectorXd x = Eigen::Map<const RowMat>(values_.data(), di, di)
                                    .llt()
                                    .solve(Eigen::Map<const Eigen::VectorXd>(v.data(), di));
      out.assign(x.data(), x.data() + x.size());
      break;
    }
  }
  return out;
}

void Covariance::apply_factor(std::span<const double> z, std::span<double> out) const {
  const std::size_t d = z.size();
  switch (kind_) {
    case Kind::Isotropic:
      for (std::size_t j = 0; j < d; ++j) out[j] = sigma_ * z[j];
      break;
    case Kind::Diagonal:
      for (std::size_t j = 0; j < d; ++j) out[j] = std::sqrt(values_[j]) * z[j];
      break;
    case Kind::Full:
      for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += factor_[i * d + j] * z[j];
        out[i] = acc;
      }
      break;
  }
}

ActivationMatrix sample_gaussian(const GaussianSpec& spec) {
  const std::size_t d = spec.mu.size();
  require(d >= 1, ErrorCode::InvalidArgument, "mean vector is empty");
  require(spec.n >= 1, ErrorCode::InvalidArgument, "sample count must be >= 1");
  spec.covariance.check_dim(d);

  Rng rng(spec.seed);
  std::vector<double> values(spec.n * d);
  std::vector<double> z(d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (auto& zj : z) zj = rng.normal();
    std::span<double> row(values.data() + i * d, d);
    spec.covariance.apply_factor(z, row);
    axpy(1.0, spec.mu, row);
  }
  return ActivationMatrix(spec.n, d, std::move(values));
}

ConceptDataset make_concept_task(std::span<const double> mu_c, std::span<const double> mu_r,
                                 const Covariance& covariance, std::size_t n_per_class,
                                 std::uint64_t seed) {
  require(mu_c.size() == mu_r.size(), ErrorCode::DimensionMismatch, "class means differ in width");
  GaussianSpec c{{mu_c.begin(), mu_c.end()}, covariance, n_per_class, derive_seed(seed, 0)};
  GaussianSpec r{{mu_r.begin(), mu_r.end()}, covariance, n_per_class, derive_seed(seed, 1)};
  return ConceptDataset(sample_gaussian(c), sample_gaussian(r));
}

std::vector<double> axis_vector(std::size_t d, std::size_t axis, double distance) {
  std::vector<double> v(d, 0.0);
  v.at(axis) = distance;
  return v;
}

Table equivalence_report(const TaskParams& task, std::span<const Method> methods, std::uint32_t trials,
                         std::uint64_t seed, const FitSettings& settings) {
  require(trials >= 1, ErrorCode::InvalidArgument, "equivalence report needs at least one trial");
  Table table({"method", "trials", "failures", "cos_diff_mean", "cos_diff_std", "cos_fisher_mean",
               "cos_fisher_std", "accuracy_mean", "accuracy_std", "time_mean"});
  table.set_meta("seed", std::to_string(seed));
  table.set_meta("trials", std::to_string(trials));
  table.set_meta("generator_version", std::to_string(kGeneratorVersion));
  if (methods.empty()) return table;

  std::vector<double> diff = task.mu_c;
  axpy(-1.0, task.mu_r, diff);
  const std::vector<double> fisher = task.covariance.solve(diff);

  struct Acc {
    std::vector<double> cos_diff, cos_fisher, acc, time;
    std::size_t failures = 0;
  };
  std::vector<Acc> acc(methods.size());

  for (std::uint32_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const ConceptDataset train =
        make_concept_task(task.mu_c, task.mu_r, task.covariance, task.n_per_class, trial_seed);
    const ConceptDataset eval = make_concept_task(task.mu_c, task.mu_r, task.covariance,
                                                  task.n_eval_per_class, derive_seed(trial_seed, 99));
    for (std::size_t m = 0; m < methods.size(); ++m) {
      try {
        const Cav cav = fit_method(methods[m], train, settings, derive_seed(trial_seed, 7));
        acc[m].cos_diff.push_back(cosine(cav.direction, diff));
        acc[m].cos_fisher.push_back(cosine(cav.direction, fisher));
        acc[m].acc.push_back(accuracy(cav, eval));
        acc[m].time.push_back(cav.fit_wall_time);
      } catch (const Error&) {
        ++acc[m].failures;
      }
    }
  }

  for (std::size_t m = 0; m < methods.size(); ++m) {
    const auto cd = summarize(acc[m].cos_diff);
    const auto cf = summarize(acc[m].cos_fisher);
    const auto ac = summarize(acc[m].acc);
    const auto tm = summarize(acc[m].time);
    table.add_row({std::string(method_name(methods[m])), std::to_string(trials),
                   std::to_string(acc[m].failures), fmt_num(cd.mean), fmt_num(cd.std), fmt_num(cf.mean),
                   fmt_num(cf.std), fmt_num(ac.mean), fmt_num(ac.std), fmt_num(tm.mean)});
  }
  return table;
}

GradientBatch planted_gradient_batch(std::span<const double> v, double p_align, std::size_t n,
                                     std::uint64_t seed, double noise) {
  require(p_align >= 0.0 && p_align <= 1.0, ErrorCode::InvalidArgument, "p_align must lie in [0, 1]");
  require(n >= 1 && !v.empty(), ErrorCode::InvalidArgument, "empty gradient batch");
  Rng rng(seed);
  const std::size_t d = v.size();
  std::vector<double> values(n * d);
  // Exactly round(p_align * n) aligned rows, in shuffled order.
  const auto aligned = static_cast<std::size_t>(std::llround(p_align * static_cast<double>(n)));
  std::vector<double> signs(n, -1.0);
  std::fill(signs.begin(), signs.begin() + static_cast<std::ptrdiff_t>(aligned), 1.0);
  rng.shuffle(std::span<double>(signs));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) values[i * d + j] = signs[i] * v[j] + noise * rng.normal();
  }
  return GradientBatch{ActivationMatrix(n, d, std::move(values)), {}, {}};
}

namespace {

std::string set_file(const std::string& set, const std::string& layer, const std::string& epoch) {
  std::string name = set + "__" + layer;
  if (!epoch.empty()) name += "__e" + epoch;
  return name + ".cavk";
}

}  // namespace

ExperimentManifest write_fixture(const fs::path& dir, const FixtureParams& p) {
  require(p.d >= 1 && p.n_per_set >= 1 && p.n_concepts >= 1 && p.n_random_sets >= 1 && !p.layers.empty(),
          ErrorCode::InvalidArgument, "fixture needs d, n, concepts, random sets and layers >= 1");
  fs::create_directories(dir / "acts");
  const auto cov = Covariance::isotropic(p.sigma);

  ExperimentManifest m;
  m.seed = p.seed;
  m.methods = p.methods;
  for (const auto& l : p.layers) m.layers.push_back({l, p.d});
  std::vector<std::string> epochs;
  for (std::size_t e = 0; e < p.epochs; ++e) epochs.push_back(std::to_string(e));
  m.epochs = epochs;
  if (epochs.empty()) epochs.emplace_back();

  std::uint64_t stream = 0;
  auto emit = [&](const std::string& set, const std::string& layer, const std::string& epoch,
                  std::vector<double> mu) {
    const fs::path path = dir / "acts" / set_file(set, layer, epoch);
    GaussianSpec spec{std::move(mu), cov, p.n_per_set, derive_seed(p.seed, stream++)};
    write_tensor(sample_gaussian(spec), p.dtype, path);
    return path;
  };

  for (std::size_t k = 0; k < p.n_concepts; ++k) {
    ActivationSet s;
    s.name = "concept" + std::to_string(k);
    const double rate = static_cast<double>(k + 1) / static_cast<double>(p.n_concepts);
    for (const auto& layer : p.layers) {
      for (std::size_t e = 0; e < epochs.size(); ++e) {
        const double dist = p.epochs == 0 ? p.separation * p.sigma
                                          : static_cast<double>(e) * p.epoch_step * p.sigma * rate;
        s.files[{layer, epochs[e]}] = emit(s.name, layer, epochs[e], axis_vector(p.d, k % p.d, dist));
      }
    }
    m.concepts.push_back(std::move(s));
  }
  for (std::size_t r = 0; r < p.n_random_sets; ++r) {
    ActivationSet s;
    s.name = "random" + std::to_string(r);
    for (const auto& layer : p.layers) {
      for (const auto& epoch : epochs) {
        s.files[{layer, epoch}] = emit(s.name, layer, epoch, std::vector<double>(p.d, 0.0));
      }
    }
    m.random_sets.push_back(std::move(s));
  }

  const fs::path manifest_path = dir / "manifest.json";
  save_manifest(m, manifest_path);
  return load_manifest(manifest_path);
}

void write_planted_gradients(const fs::path& dir, const FixtureParams& params, const std::string& class_name,
                             double p_align, std::size_t n, std::uint64_t seed) {
  fs::create_directories(dir / class_name);
  const auto v = axis_vector(params.d, 0, 1.0);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto batch = planted_gradient_batch(v, p_align, n, derive_seed(seed, l));
    write_tensor(batch.grads, params.dtype, dir / class_name / (params.layers[l] + ".cavk"));
  }
}

Table support_vector_study(const SupportVectorStudyParams& p) {
  require(!p.dims.empty() && p.n_per_class >= 1 && p.sigma > 0.0, ErrorCode::InvalidArgument,
          "support-vector study needs dimensions, samples and sigma > 0");
  Table t({"d", "concept_ratio", "random_ratio", "ratio", "epochs", "final_loss", "margin_resolution"});
  for (std::size_t d : p.dims) {
    const auto ds = make_concept_task(axis_vector(d, 0, p.separation * p.sigma), std::vector<double>(d, 0.0),
                                      Covariance::isotropic(p.sigma), p.n_per_class, derive_seed(p.seed, 0));
    double sq = 0.0;
    for (const auto* m : {&ds.concept_acts(), &ds.random_acts()}) sq += dot(m->values(), m->values());
    const double mean_sq_norm = sq / static_cast<double>(ds.size());

    SgdConfig cfg;
    cfg.lambda = p.lambda;
    cfg.schedule.eta0 = 1.0 / mean_sq_norm;
    cfg.schedule.power = 0.5;
    cfg.max_epochs = p.epochs;
    cfg.tolerance = 0.0;
    cfg.patience = p.epochs;
    cfg.shuffle_seed = derive_seed(p.seed, 1);
    const Cav cav = fit_svm_sgd(ds, cfg);
    const auto r = support_vector_ratio(cav, ds, p.slack);
    const double pooled = (r.concept_ratio * static_cast<double>(ds.concept_acts().rows()) +
                           r.random_ratio * static_cast<double>(ds.random_acts().rows())) /
                          static_cast<double>(ds.size());
    const double updates = static_cast<double>(cfg.max_epochs) * static_cast<double>(ds.size());
    t.add_row({fmt_num(d), fmt_num(r.concept_ratio), fmt_num(r.random_ratio), fmt_num(pooled),
               std::to_string(cav.meta.iterations), fmt_num(cav.meta.loss_history.back()),
               fmt_num(cfg.schedule.at(static_cast<std::uint64_t>(updates)) * mean_sq_norm)});
  }
  return t;
}

}  // namespace fastcav
