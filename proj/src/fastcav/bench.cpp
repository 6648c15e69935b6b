#include "fastcav/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"
#include "fastcav/parallel.hpp"
#include "fastcav/rng.hpp"
#include "fastcav/synth.hpp"
#include "fastcav/tensor_io.hpp"

namespace fastcav {

namespace {

using Clock = std::chrono::steady_clock;

volatile std::uint64_t eviction_sink = 0;

void evict(std::vector<std::uint8_t>& buffer, std::uint8_t round) {
  for (std::size_t i = 0; i < buffer.size(); i += 64) buffer[i] = static_cast<std::uint8_t>(buffer[i] + round);
  std::uint64_t sink = 0;
  for (std::size_t i = 0; i < buffer.size(); i += 4096) sink += buffer[i];
  eviction_sink = sink;
}

}  // namespace

TimedMethod timed_method(Method method, const FitSettings& settings, std::uint64_t seed) {
  return TimedMethod{std::string(method_name(method)),
                     [method, settings, seed](const ConceptDataset& ds) { return fit_method(method, ds, settings, seed); },
                     settings.internally_parallel()};
}

TimingRecord time_fit(const TimedMethod& method, const ConceptDataset& ds, std::uint32_t repeats,
                      const TimingOptions& options) {
  require(repeats >= 3, ErrorCode::InvalidArgument, "timing needs at least 3 repeats, got " + std::to_string(repeats));
  require(!method.internally_parallel, ErrorCode::ParallelRefused,
          "refusing to time '" + method.name + "' with internal parallelism enabled");
  require(static_cast<bool>(method.fit), ErrorCode::InvalidArgument, "no fit routine");

  std::vector<std::uint8_t> buffer(options.evict_cache ? options.evict_bytes : 0);
  (void)method.fit(ds);  // warm-up, discarded

  TimingRecord rec;
  rec.method = method.name;
  rec.n = ds.size();
  rec.d = ds.dim();
  rec.repeats = repeats;
  for (std::uint32_t r = 0; r < repeats; ++r) {
    if (options.evict_cache) evict(buffer, static_cast<std::uint8_t>(r + 1));
    const auto start = Clock::now();
    const Cav cav = method.fit(ds);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    rec.samples.push_back(std::max(elapsed, 1e-9));
    (void)cav;
  }
  const Summary s = summarize(rec.samples);
  rec.mean = s.mean;
  rec.std = s.std;
  rec.min = s.min;
  return rec;
}

SpeedupComparison compare_timings(const TimingRecord& fast, const TimingRecord& slow) {
  return {slow.mean / fast.mean, welch_t_test(fast.samples, slow.samples)};
}

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 3, ErrorCode::DegenerateGrid, "slope fit needs >= 3 points");
  const std::size_t k = x.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    require(x[i] > 0 && y[i] > 0, ErrorCode::InvalidArgument, "log-log fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = pairwise_sum(lx) / static_cast<double>(k);
  const double my = pairwise_sum(ly) / static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, ErrorCode::DegenerateGrid, "grid has no spread");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  const double dof = static_cast<double>(k - 2);
  fit.std_error = std::sqrt(sse / dof / sxx);
  const double tq = student_t_quantile(0.95, dof);
  fit.ci_low = fit.slope - tq * fit.std_error;
  fit.ci_high = fit.slope + tq * fit.std_error;
  return fit;
}

void check_geometric_grid(const std::vector<std::size_t>& grid, const std::string& name) {
  require(grid.size() >= 3, ErrorCode::DegenerateGrid, name + " grid needs at least 3 points");
  std::vector<double> ratios;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(grid[i - 1] >= 1 && grid[i] > grid[i - 1], ErrorCode::DegenerateGrid,
            name + " grid must be strictly increasing and positive");
    ratios.push_back(static_cast<double>(grid[i]) / static_cast<double>(grid[i - 1]));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  require(*hi / *lo <= 1.05, ErrorCode::DegenerateGrid, name + " grid is not geometrically spaced");
}

ScalingResult scaling_study(const TimedMethod& method, const ScalingParams& p) {
  check_geometric_grid(p.n_grid, "n");
  check_geometric_grid(p.d_grid, "d");
  require(p.n_fixed >= 2 && p.d_fixed >= 1, ErrorCode::InvalidArgument, "fixed sizes must be positive");

  ScalingResult result;
  result.table = Table({"axis", "method", "n", "d", "repeats", "mean_s", "std_s", "min_s"});
  result.table.set_meta("seed", std::to_string(p.seed));
  result.table.set_meta("statistic", "min");

  auto run = [&](const std::string& axis, std::size_t n, std::size_t d, std::uint64_t stream) {
    const std::size_t per_class = std::max<std::size_t>(1, n / 2);
    const auto task = make_concept_task(axis_vector(d, 0, p.separation), std::vector<double>(d, 0.0),
                                        Covariance::isotropic(1.0), per_class, derive_seed(p.seed, stream));
    TimingRecord rec = time_fit(method, task, p.repeats, p.timing);
    result.table.add_row({axis, method.name, fmt_num(task.size()), fmt_num(d), std::to_string(rec.repeats),
                          fmt_num(rec.mean), fmt_num(rec.std), fmt_num(rec.min)});
    return rec;
  };

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p.n_grid.size(); ++i) {
    const auto rec = run("n", p.n_grid[i], p.d_fixed, i);
    xs.push_back(static_cast<double>(rec.n));
    ys.push_back(rec.min);
  }
  result.n_slope = loglog_slope(xs, ys);
  xs.clear();
  ys.clear();
  for (std::size_t i = 0; i < p.d_grid.size(); ++i) {
    const auto rec = run("d", p.n_fixed, p.d_grid[i], 100 + i);
    xs.push_back(static_cast<double>(rec.d));
    ys.push_back(rec.min);
  }
  result.d_slope = loglog_slope(xs, ys);
  result.table.set_meta("slope_n", fmt_num(result.n_slope.slope));
  result.table.set_meta("slope_d", fmt_num(result.d_slope.slope));
  return result;
}

SensitivityResult sensitivity_study(const SensitivityParams& p) {
  require(!p.set_sizes.empty() && !p.random_set_counts.empty(), ErrorCode::InvalidArgument,
          "sensitivity grids must be non-empty");
  require(p.seeds >= 1 && p.d >= 1 && p.random_sets_for_size_panel >= 1 && p.set_size_for_count_panel >= 1,
          ErrorCode::InvalidArgument, "sensitivity parameters must be positive");
  for (auto s : p.set_sizes) require(s >= 1, ErrorCode::InvalidArgument, "set sizes must be >= 1");
  for (auto r : p.random_set_counts) require(r >= 1, ErrorCode::InvalidArgument, "random-set counts must be >= 1");

  const auto cov = Covariance::isotropic(p.sigma);
  const auto mu_c = axis_vector(p.d, 0, p.separation * p.sigma);
  const std::vector<double> mu_r(p.d, 0.0);
  const std::size_t max_size = *std::max_element(p.set_sizes.begin(), p.set_sizes.end());
  const std::size_t max_count = *std::max_element(p.random_set_counts.begin(), p.random_set_counts.end());

  auto draw = [&](const std::vector<double>& mu, std::size_t n, std::uint64_t seed) {
    return sample_gaussian(GaussianSpec{mu, cov, n, seed});
  };

  // Per seed and grid point: accuracies against each random set. Grid points
  // share nested prefixes of one pool per seed.
  struct Cell {
    double mean = 0.0;
    double within_std = 0.0;
  };
  auto evaluate = [&](const ActivationMatrix& concept_acts, const std::vector<ActivationMatrix>& randoms,
                      std::size_t count, const ConceptDataset& eval, std::uint64_t seed) {
    std::vector<double> accs;
    for (std::size_t r = 0; r < count; ++r) {
      const ConceptDataset ds(concept_acts, randoms[r]);
      accs.push_back(accuracy(fit_method(p.method, ds, p.settings, derive_seed(seed, r)), eval));
    }
    const Summary s = summarize(accs);
    return Cell{s.mean, s.std};
  };

  std::vector<std::vector<Cell>> size_cells(p.seeds, std::vector<Cell>(p.set_sizes.size()));
  std::vector<std::vector<Cell>> count_cells(p.seeds, std::vector<Cell>(p.random_set_counts.size()));

  parallel_for(p.seeds, p.threads, [&](std::size_t s) {
    const std::uint64_t seed = derive_seed(p.seed, s);
    const ConceptDataset eval(draw(mu_c, p.n_eval_per_class, derive_seed(seed, 1)),
                              draw(mu_r, p.n_eval_per_class, derive_seed(seed, 2)));

    const auto concept_pool = draw(mu_c, max_size, derive_seed(seed, 3));
    std::vector<ActivationMatrix> random_pool;
    for (std::size_t r = 0; r < p.random_sets_for_size_panel; ++r) {
      random_pool.push_back(draw(mu_r, max_size, derive_seed(seed, 1000 + r)));
    }
    for (std::size_t g = 0; g < p.set_sizes.size(); ++g) {
      const std::size_t size = p.set_sizes[g];
      std::vector<ActivationMatrix> randoms;
      for (const auto& r : random_pool) randoms.push_back(r.slice_rows(0, size));
      size_cells[s][g] = evaluate(concept_pool.slice_rows(0, size), randoms, randoms.size(), eval,
                                  derive_seed(seed, 10 + g));
    }

    const std::size_t fixed = p.set_size_for_count_panel;
    const auto concept_fixed = draw(mu_c, fixed, derive_seed(seed, 4));
    std::vector<ActivationMatrix> randoms;
    for (std::size_t r = 0; r < max_count; ++r) randoms.push_back(draw(mu_r, fixed, derive_seed(seed, 100000 + r)));
    for (std::size_t g = 0; g < p.random_set_counts.size(); ++g) {
      count_cells[s][g] = evaluate(concept_fixed, randoms, p.random_set_counts[g], eval, derive_seed(seed, 20 + g));
    }
  });

  auto collapse = [&](const std::vector<std::vector<Cell>>& cells, std::size_t g) {
    std::vector<double> means, within;
    for (const auto& per_seed : cells) {
      means.push_back(per_seed[g].mean);
      within.push_back(per_seed[g].within_std);
    }
    const Summary m = summarize(means);
    return std::vector<std::string>{fmt_num(m.mean), fmt_num(m.std), fmt_num(summarize(within).mean)};
  };

  SensitivityResult out;
  out.by_set_size = Table({"set_size", "acc_mean", "acc_std", "acc_std_within"});
  out.by_random_sets = Table({"n_random_sets", "acc_mean", "acc_std", "acc_std_within"});
  for (Table* t : {&out.by_set_size, &out.by_random_sets}) {
    t->set_meta("seed", std::to_string(p.seed));
    t->set_meta("seeds", std::to_string(p.seeds));
    t->set_meta("method", std::string(method_name(p.method)));
    t->set_meta("d", std::to_string(p.d));
    t->set_meta("separation", fmt_num(p.separation));
  }
  out.by_set_size.set_meta("random_sets", std::to_string(p.random_sets_for_size_panel));
  out.by_random_sets.set_meta("set_size", std::to_string(p.set_size_for_count_panel));
  for (std::size_t g = 0; g < p.set_sizes.size(); ++g) {
    auto row = collapse(size_cells, g);
    row.insert(row.begin(), std::to_string(p.set_sizes[g]));
    out.by_set_size.add_row(std::move(row));
  }
  for (std::size_t g = 0; g < p.random_set_counts.size(); ++g) {
    auto row = collapse(count_cells, g);
    row.insert(row.begin(), std::to_string(p.random_set_counts[g]));
    out.by_random_sets.add_row(std::move(row));
  }
  return out;
}

double normalized_auc(const std::vector<double>& values) {
  require(!values.empty(), ErrorCode::InvalidArgument, "AUC of an empty curve");
  if (values.size() == 1) return values.front();
  double area = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) area += 0.5 * (values[i - 1] + values[i]);
  return area / static_cast<double>(values.size() - 1);
}

TrackingGrid tracking_study(const ExperimentManifest& m, const TrackingParams& p) {
  require(m.epochs.size() >= 2, ErrorCode::InvalidArgument, "tracking needs at least two epochs");
  require(!m.layers.empty() && !m.concepts.empty() && !m.random_sets.empty(), ErrorCode::InvalidArgument,
          "tracking needs at least one layer, concept and random set");

  TrackingGrid g;
  g.epochs = m.epochs;
  for (const auto& l : m.layers) g.layers.push_back(l.name);
  for (const auto& c : m.concepts) g.concepts.push_back(c.name);
  g.learned_threshold = p.learned_threshold;
  const std::size_t E = g.epochs.size(), L = g.layers.size(), C = g.concepts.size();
  g.accuracy.assign(E, std::vector<std::vector<double>>(L, std::vector<double>(C, 0.0)));

  auto split_seed = [&](std::uint64_t set_id, std::size_t l, std::size_t e) {
    return derive_seed(derive_seed(m.seed, set_id), l * 100003 + e);
  };

  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<RowSplit> randoms;
      for (std::size_t r = 0; r < m.random_sets.size(); ++r) {
        const auto acts = read_tensor(m.random_sets[r].path(g.layers[l], g.epochs[e]));
        randoms.push_back(split_rows(acts, p.holdout_fraction, split_seed(1000000 + r, l, e)));
      }
      parallel_for(C, p.threads, [&](std::size_t c) {
        const auto acts = read_tensor(m.concepts[c].path(g.layers[l], g.epochs[e]));
        const RowSplit cs = split_rows(acts, p.holdout_fraction, split_seed(c, l, e));
        std::vector<double> accs;
        for (std::size_t r = 0; r < randoms.size(); ++r) {
          const ConceptDataset train(cs.train, randoms[r].train, g.concepts[c], g.layers[l]);
          const ConceptDataset eval(cs.eval, randoms[r].eval);
          accs.push_back(accuracy(fit_method(p.method, train, p.settings, split_seed(c, l, e) + r), eval));
        }
        g.accuracy[e][l][c] = summarize(accs).mean;
      });
    }
  }

  g.auc.assign(L, std::vector<double>(C, 0.0));
  g.rank.assign(L, {});
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t c = 0; c < C; ++c) {
      std::vector<double> curve(E);
      for (std::size_t e = 0; e < E; ++e) curve[e] = g.accuracy[e][l][c];
      g.auc[l][c] = normalized_auc(curve);
    }
    std::vector<std::size_t> order(C);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (g.auc[l][a] != g.auc[l][b]) return g.auc[l][a] > g.auc[l][b];
      return g.concepts[a] < g.concepts[b];
    });
    g.rank[l] = std::move(order);
  }

  g.learned_ratio.assign(E, std::vector<double>(L, 0.0));
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t l = 0; l < L; ++l) {
      std::size_t learned = 0;
      for (std::size_t c = 0; c < C; ++c) learned += g.accuracy[e][l][c] > p.learned_threshold ? 1 : 0;
      g.learned_ratio[e][l] = static_cast<double>(learned) / static_cast<double>(C);
    }
  }
  return g;
}

Table TrackingGrid::accuracy_table() const {
  Table t({"epoch", "layer", "concept", "accuracy"});
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (std::size_t c = 0; c < concepts.size(); ++c) {
        t.add_row({epochs[e], layers[l], concepts[c], fmt_num(accuracy[e][l][c])});
      }
    }
  }
  return t;
}

Table TrackingGrid::auc_table() const {
  Table t({"layer", "rank", "concept", "auc"});
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t k = 0; k < rank[l].size(); ++k) {
      const std::size_t c = rank[l][k];
      t.add_row({layers[l], std::to_string(k + 1), concepts[c], fmt_num(auc[l][c])});
    }
  }
  return t;
}

Table TrackingGrid::learned_table() const {
  Table t({"epoch", "layer", "learned_ratio"});
  t.set_meta("learned_threshold", fmt_num(learned_threshold));
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      t.add_row({epochs[e], layers[l], fmt_num(learned_ratio[e][l])});
    }
  }
  return t;
}

}  // namespace fastcav
