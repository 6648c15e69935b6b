#include "fastcav/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"
#include "fastcav/rng.hpp"

namespace fastcav {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Sample {
  std::span<const double> x;
  double y;
};

std::vector<Sample> labelled_samples(const ConceptDataset& ds) {
  std::vector<Sample> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.concept_acts().rows(); ++i) out.push_back({ds.concept_acts().row(i), 1.0});
  for (std::size_t i = 0; i < ds.random_acts().rows(); ++i) out.push_back({ds.random_acts().row(i), -1.0});
  return out;
}

Cav finish(std::vector<double> w, double b0, Method method, const ConceptDataset& ds, FitMeta meta,
           Clock::time_point start) {
  const double len = norm2(w);
  require(std::isfinite(len), ErrorCode::NonFinite, std::string(method_name(method)) + ": weights diverged");
  require(len >= kZeroDirectionThreshold, ErrorCode::ZeroDirection,
          std::string(method_name(method)) + ": weight vector vanished (|w| = " + std::to_string(len) + ")");
  scale(1.0 / len, w);
  Cav cav;
  cav.direction = std::move(w);
  cav.intercept = b0 / len;
  cav.method = method;
  cav.concept_name = ds.concept_name();
  cav.layer = ds.layer();
  meta.weight_norm = len;
  cav.meta = std::move(meta);
  cav.fit_wall_time = seconds_since(start);
  return cav;
}

enum class Loss { Hinge, Logistic };

// log(1 + exp(-m)) without overflow.
double log_loss(double margin) {
  return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// sigma(-m) = 1 / (1 + exp(m)), the magnitude of the logistic gradient.
double logistic_weight(double margin) {
  if (margin >= 0) {
    const double e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

// Per-sample SGD with L2 penalty lambda*|w|^2. The weight vector is stored as
// wscale * raw so the shrink step costs O(1); raw is rescaled when wscale gets
// small.
Cav run_l2_sgd(const ConceptDataset& ds, const SgdConfig& cfg, Loss loss, Method method) {
  cfg.validate();
  const auto start = Clock::now();
  const auto samples = labelled_samples(ds);
  const std::size_t n = samples.size();
  const std::size_t d = ds.dim();

  std::vector<double> raw(d, 0.0);
  double wscale = 1.0;
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.shuffle_seed);

  FitMeta meta;
  meta.regularization = cfg.lambda;
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t stale = 0;
  std::uint64_t t = 0;
  std::uint32_t epoch = 0;

  for (; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Sample& s = samples[idx];
      ++t;
      const double eta = cfg.schedule.at(t);
      const double margin = s.y * (wscale * dot(raw, s.x) + b);

      double step = 0.0;
      if (loss == Loss::Hinge) {
        loss_sum += std::max(0.0, 1.0 - margin);
        if (margin < 1.0) step = eta * s.y;
      } else {
        loss_sum += log_loss(margin);
        step = eta * s.y * logistic_weight(margin);
      }

      const double shrink = 1.0 - 2.0 * eta * cfg.lambda;
      if (shrink <= 0.0) {
        std::fill(raw.begin(), raw.end(), 0.0);
        wscale = 1.0;
      } else {
        wscale *= shrink;
      }
      if (step != 0.0) {
        axpy(step / wscale, s.x, raw);
        b += step;
      }
      if (wscale < 1e-9) {
        scale(wscale, raw);
        wscale = 1.0;
      }
    }
    const double wn = wscale * norm2(raw);
    const double epoch_loss = loss_sum / static_cast<double>(n) + cfg.lambda * wn * wn;
    require(std::isfinite(epoch_loss) && std::isfinite(b), ErrorCode::NonFinite,
            std::string(method_name(method)) + ": loss diverged at epoch " + std::to_string(epoch + 1));
    meta.loss_history.push_back(epoch_loss);
    if (epoch_loss > best - cfg.tolerance) {
      if (++stale >= cfg.patience) {
        ++epoch;
        break;
      }
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
  }

  meta.iterations = epoch;
  meta.detail = loss == Loss::Hinge ? "sgd-hinge" : "sgd-logistic";
  scale(wscale, raw);
  return finish(std::move(raw), b, method, ds, std::move(meta), start);
}

// Rows of D_c then D_r, each minus a per-class centre, materialized one
// column tile at a time so d x n copies never exist.
class CenteredRows {
 public:
  CenteredRows(const ConceptDataset& ds, std::span<const double> centre_c, std::span<const double> centre_r)
      : ds_(ds), centre_c_(centre_c), centre_r_(centre_r) {}

  std::size_t rows() const { return ds_.size(); }
  std::size_t cols() const { return ds_.dim(); }

  void tile(std::size_t c0, std::size_t w, Eigen::MatrixXd& out) const {
    out.resize(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(w));
    const std::size_t nc = ds_.concept_acts().rows();
    for (std::size_t i = 0; i < rows(); ++i) {
      const bool is_c = i < nc;
      const auto x = is_c ? ds_.concept_acts().row(i) : ds_.random_acts().row(i - nc);
      const auto mu = is_c ? centre_c_ : centre_r_;
      for (std::size_t j = 0; j < w; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[c0 + j] - mu[c0 + j];
    }
  }

  template <typename F>
  void for_each_tile(F&& f) const {
    Eigen::MatrixXd buf;
    for (std::size_t c0 = 0; c0 < cols(); c0 += kTile) {
      const std::size_t w = std::min(kTile, cols() - c0);
      tile(c0, w, buf);
      f(c0, w, buf);
    }
  }

  /// Z Z^T
  Eigen::MatrixXd gram() const {
    const auto n = static_cast<Eigen::Index>(rows());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for_each_tile([&](std::size_t, std::size_t, const Eigen::MatrixXd& z) {
      g.selfadjointView<Eigen::Lower>().rankUpdate(z);
    });
    return g.selfadjointView<Eigen::Lower>();
  }

  /// Z v
  Eigen::VectorXd times(std::span<const double> v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows()));
    for_each_tile([&](std::size_t c0, std::size_t w, const Eigen::MatrixXd& z) {
      out += z * Eigen::Map<const Eigen::VectorXd>(v.data() + c0, static_cast<Eigen::Index>(w));
    });
    return out;
  }

  /// Z^T a
  std::vector<double> transpose_times(const Eigen::VectorXd& a) const {
    std::vector<double> out(cols());
    for_each_tile([&](std::size_t c0, std::size_t w, const Eigen::MatrixXd& z) {
      Eigen::Map<Eigen::VectorXd>(out.data() + c0, static_cast<Eigen::Index>(w)) = z.transpose() * a;
    });
    return out;
  }

  /// Z^T Z (only sensible for small d).
  Eigen::MatrixXd scatter() const {
    Eigen::MatrixXd z;
    tile(0, cols(), z);
    return z.transpose() * z;
  }

 private:
  static constexpr std::size_t kTile = 1024;
  const ConceptDataset& ds_;
  std::span<const double> centre_c_;
  std::span<const double> centre_r_;
};

// Pseudo-inverse of a symmetric PSD matrix applied twice: (G^+)^2 v.
Eigen::VectorXd pinv_squared_apply(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const double top = vals.cwiseAbs().maxCoeff();
  const double cutoff = top * 1e-12 * static_cast<double>(g.rows());
  Eigen::VectorXd proj = eig.eigenvectors().transpose() * v;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    proj(i) = vals(i) > cutoff ? proj(i) / (vals(i) * vals(i)) : 0.0;
  }
  return eig.eigenvectors() * proj;
}

}  // namespace

double LearningRate::at(std::uint64_t t) const noexcept {
  if (kind == Kind::Constant) return eta0;
  return eta0 / std::pow(static_cast<double>(t), power);
}

void SgdConfig::validate() const {
  require(max_epochs >= 1, ErrorCode::InvalidArgument, "SGD needs at least one epoch");
  require(schedule.eta0 > 0.0 && std::isfinite(schedule.eta0), ErrorCode::InvalidArgument,
          "learning rate must be positive");
  require(schedule.power >= 0.0, ErrorCode::InvalidArgument, "inverse-scaling power must be >= 0");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
          "regularization must be >= 0");
  require(tolerance >= 0.0, ErrorCode::InvalidArgument, "tolerance must be >= 0");
  require(patience >= 1, ErrorCode::InvalidArgument, "patience must be >= 1");
}

Cav fit_svm_sgd(const ConceptDataset& ds, const SgdConfig& cfg) {
  return run_l2_sgd(ds, cfg, Loss::Hinge, Method::SvmSgd);
}

Cav fit_logreg(const ConceptDataset& ds, double lambda, std::uint32_t epochs, std::uint64_t shuffle_seed) {
  SgdConfig cfg;
  cfg.lambda = lambda;
  cfg.max_epochs = epochs;
  cfg.shuffle_seed = shuffle_seed;
  return run_l2_sgd(ds, cfg, Loss::Logistic, Method::LogReg);
}

Cav fit_sparse_logreg(const ConceptDataset& ds, double lambda1, std::uint32_t epochs,
                      std::uint64_t shuffle_seed) {
  SgdConfig cfg;
  cfg.lambda = lambda1;
  cfg.max_epochs = epochs;
  cfg.shuffle_seed = shuffle_seed;
  cfg.validate();

  const auto start = Clock::now();
  const auto samples = labelled_samples(ds);
  const std::size_t n = samples.size();
  std::vector<double> w(ds.dim(), 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(shuffle_seed);

  FitMeta meta;
  meta.regularization = lambda1;
  meta.detail = "sgd-logistic-l1-prox";
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t stale = 0;
  std::uint64_t t = 0;
  std::uint32_t epoch = 0;
  for (; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Sample& s = samples[idx];
      const double eta = cfg.schedule.at(++t);
      const double margin = s.y * (dot(w, s.x) + b);
      loss_sum += log_loss(margin);
      const double step = eta * s.y * logistic_weight(margin);
      axpy(step, s.x, w);
      b += step;
      const double thresh = eta * lambda1;
      for (double& wj : w) wj = std::copysign(std::max(std::fabs(wj) - thresh, 0.0), wj);
    }
    double l1 = 0.0;
    for (double wj : w) l1 += std::fabs(wj);
    const double epoch_loss = loss_sum / static_cast<double>(n) + lambda1 * l1;
    require(std::isfinite(epoch_loss), ErrorCode::NonFinite,
            "sparse_logreg: loss diverged at epoch " + std::to_string(epoch + 1));
    meta.loss_history.push_back(epoch_loss);
    if (epoch_loss > best - cfg.tolerance) {
      if (++stale >= cfg.patience) {
        ++epoch;
        break;
      }
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
  }
  meta.iterations = epoch;
  return finish(std::move(w), b, Method::SparseLogReg, ds, std::move(meta), start);
}

Cav fit_lda(const ConceptDataset& ds, const LdaConfig& cfg) {
  require(cfg.ridge >= 0.0 && std::isfinite(cfg.ridge), ErrorCode::InvalidArgument,
          "LDA ridge must be >= 0");
  require(ds.size() >= 3, ErrorCode::InvalidArgument, "LDA needs at least three samples");
  const auto start = Clock::now();
  const std::size_t d = ds.dim();
  const std::size_t n = ds.size();
  const double dof = static_cast<double>(n - 2);

  const auto mu_c = column_means(ds.concept_acts());
  const auto mu_r = column_means(ds.random_acts());
  std::vector<double> delta = mu_c;
  axpy(-1.0, mu_r, delta);
  const CenteredRows z(ds, mu_c, mu_r);

  auto solver = cfg.solver;
  if (solver == LdaConfig::Solver::Auto) {
    solver = d + 2 < n ? LdaConfig::Solver::DirectSolve : LdaConfig::Solver::PseudoInverse;
  }

  FitMeta meta;
  meta.regularization = cfg.ridge;
  std::vector<double> w;

  if (solver == LdaConfig::Solver::DirectSolve) {
    meta.detail = "direct-solve";
    if (cfg.ridge == 0.0) {
      require(d <= n - 2, ErrorCode::SingularCovariance,
              "within-class covariance has rank <= " + std::to_string(n - 2) + " < d = " +
                  std::to_string(d) + "; use the pseudo-inverse solver or a positive ridge");
    }
    Eigen::MatrixXd cov = z.scatter() / dof;
    cov.diagonal().array() += cfg.ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const bool ok = llt.info() == Eigen::Success && llt.rcond() > 1e-12;
    require(ok, ErrorCode::SingularCovariance,
            "within-class covariance is numerically singular; use the pseudo-inverse solver or a "
            "positive ridge");
    const Eigen::VectorXd sol = llt.solve(Eigen::Map<const Eigen::VectorXd>(delta.data(), static_cast<Eigen::Index>(d)));
    w.assign(sol.data(), sol.data() + sol.size());
  } else {
    meta.detail = "gram-dual";
    const Eigen::MatrixXd g = z.gram();
    const Eigen::VectorXd zd = z.times(delta);
    if (cfg.ridge > 0.0) {
      // (ridge I + Z^T Z / m)^-1 = (I - Z^T (m ridge I + Z Z^T)^-1 Z) / ridge
      Eigen::MatrixXd inner = g;
      inner.diagonal().array() += dof * cfg.ridge;
      const Eigen::VectorXd coef = inner.ldlt().solve(zd);
      w = z.transpose_times(coef);
      for (std::size_t j = 0; j < d; ++j) w[j] = (delta[j] - w[j]) / cfg.ridge;
    } else {
      // (Z^T Z / m)^+ delta = m Z^T (G^+)^2 Z delta
      const Eigen::VectorXd coef = dof * pinv_squared_apply(g, zd);
      w = z.transpose_times(coef);
    }
  }

  std::vector<double> midpoint = mu_c;
  axpy(1.0, mu_r, midpoint);
  scale(0.5, midpoint);
  const double b0 = -dot(w, midpoint);
  return finish(std::move(w), b0, Method::Lda, ds, std::move(meta), start);
}

Cav fit_ridge(const ConceptDataset& ds, double lambda) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "ridge lambda must be >= 0");
  const auto start = Clock::now();
  const std::size_t d = ds.dim();
  const std::size_t n = ds.size();
  const auto mean = global_mean(ds);
  const double nc = static_cast<double>(ds.concept_acts().rows());
  const double y_mean = (nc - static_cast<double>(ds.random_acts().rows())) / static_cast<double>(n);

  Eigen::VectorXd yc(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    yc(static_cast<Eigen::Index>(i)) = (i < ds.concept_acts().rows() ? 1.0 : -1.0) - y_mean;
  }
  const CenteredRows x(ds, mean, mean);

  FitMeta meta;
  meta.regularization = lambda;
  std::vector<double> w;
  if (d <= n) {
    meta.detail = "primal";
    Eigen::MatrixXd xc;
    x.tile(0, d, xc);
    Eigen::MatrixXd a = xc.transpose() * xc;
    a.diagonal().array() += lambda;
    const Eigen::VectorXd rhs = xc.transpose() * yc;
    const Eigen::VectorXd sol = lambda > 0.0 ? Eigen::VectorXd(a.ldlt().solve(rhs))
                                             : Eigen::VectorXd(a.completeOrthogonalDecomposition().solve(rhs));
    w.assign(sol.data(), sol.data() + sol.size());
  } else {
    meta.detail = "dual";
    Eigen::MatrixXd g = x.gram();
    g.diagonal().array() += lambda;
    const Eigen::VectorXd coef = lambda > 0.0 ? Eigen::VectorXd(g.ldlt().solve(yc))
                                              : Eigen::VectorXd(g.completeOrthogonalDecomposition().solve(yc));
    w = x.transpose_times(coef);
  }
  const double b0 = y_mean - dot(w, mean);
  return finish(std::move(w), b0, Method::Ridge, ds, std::move(meta), start);
}

SupportVectorRatio support_vector_ratio(const Cav& cav, const ConceptDataset& ds, double slack) {
  require(cav.method == Method::SvmSgd, ErrorCode::WrongMethod,
          "support vectors are defined for SVM CAVs only, got " + std::string(method_name(cav.method)));
  require(cav.dim() == ds.dim(), ErrorCode::DimensionMismatch, "CAV and data differ in width");
  require(slack >= 0.0, ErrorCode::InvalidArgument, "slack must be >= 0");
  const double wn = cav.meta.weight_norm;
  auto count = [&](const ActivationMatrix& m, double y) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double margin = y * wn * (dot(cav.direction, m.row(i)) + cav.intercept);
      if (margin <= 1.0 + slack) ++k;
    }
    return static_cast<double>(k) / static_cast<double>(m.rows());
  };
  return {count(ds.concept_acts(), 1.0), count(ds.random_acts(), -1.0)};
}

}  // namespace fastcav
