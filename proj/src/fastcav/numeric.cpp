#include "fastcav/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

namespace fastcav {

namespace {

constexpr std::size_t kLeaf = 128;
constexpr std::size_t kTileCols = 2048;
constexpr std::size_t kLeafRows = 8;

double leaf_sum(const double* x, std::size_t n) noexcept {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i];
    acc[1] += x[i + 1];
    acc[2] += x[i + 2];
    acc[3] += x[i + 3];
  }
  for (; i < n; ++i) acc[0] += x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_rec(const double* x, std::size_t n) noexcept {
  if (n <= kLeaf) return leaf_sum(x, n);
  const std::size_t half = n / 2;
  return sum_rec(x, half) + sum_rec(x + half, n - half);
}

double leaf_dot(const double* a, const double* b, std::size_t n) noexcept {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double dot_rec(const double* a, const double* b, std::size_t n) noexcept {
  if (n <= kLeaf) return leaf_dot(a, b, n);
  const std::size_t half = n / 2;
  return dot_rec(a, b, half) + dot_rec(a + half, b + half, n - half);
}

// Sums K rows left to right in one sweep so each output column is stored once.
template <std::size_t K>
void leaf_rows(const double* const* src, std::size_t w, double* out) noexcept {
  for (std::size_t j = 0; j < w; ++j) {
    double acc = src[0][j];
    for (std::size_t r = 1; r < K; ++r) acc += src[r][j];
    out[j] = acc;
  }
}

template <std::size_t... K>
void leaf_dispatch(std::size_t k, const double* const* src, std::size_t w, double* out,
                   std::index_sequence<K...>) noexcept {
  ((k == K + 1 ? leaf_rows<K + 1>(src, w, out) : void()), ...);
}

// Pairwise reduction of rows [r0, r1) restricted to columns [c0, c0 + w).
// The right half of each split lands in scratch[level]; deeper levels use
// deeper slots, so slots are never shared by live partial sums.
void sum_rows_tile(const ActivationMatrix& m, std::size_t r0, std::size_t r1, std::size_t c0,
                   std::size_t w, double* out, std::vector<double>& scratch, std::size_t level) {
  if (r1 - r0 <= kLeafRows) {
    const double* src[kLeafRows];
    for (std::size_t r = r0; r < r1; ++r) src[r - r0] = m.row(r).data() + c0;
    leaf_dispatch(r1 - r0, src, w, out, std::make_index_sequence<kLeafRows>{});
    return;
  }
  const std::size_t mid = r0 + (r1 - r0) / 2;
  double* right = scratch.data() + level * kTileCols;
  sum_rows_tile(m, r0, mid, c0, w, out, scratch, level + 1);
  sum_rows_tile(m, mid, r1, c0, w, right, scratch, level + 1);
  for (std::size_t j = 0; j < w; ++j) out[j] += right[j];
}

std::size_t tree_depth(std::size_t rows) {
  std::size_t depth = 1;
  while (rows > kLeafRows) {
    rows = (rows + 1) / 2;
    ++depth;
  }
  return depth;
}

}  // namespace

double pairwise_sum(std::span<const double> x) noexcept { return sum_rec(x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return dot_rec(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> x) noexcept { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  const std::size_t n = x.size();
  const double* xs = x.data();
  double* ys = y.data();
  for (std::size_t i = 0; i < n; ++i) ys[i] += alpha * xs[i];
}

void scale(double alpha, std::span<double> x) noexcept {
  for (double& v : x) v *= alpha;
}

std::vector<double> column_sums(const ActivationMatrix& m, unsigned threads) {
  const std::size_t d = m.cols();
  std::vector<double> out(d, 0.0);
  const std::size_t n_tiles = (d + kTileCols - 1) / kTileCols;
  const std::size_t depth = tree_depth(m.rows());

  auto work = [&](std::size_t tile_begin, std::size_t tile_end) {
    std::vector<double> scratch(depth * kTileCols);
    for (std::size_t t = tile_begin; t < tile_end; ++t) {
      const std::size_t c0 = t * kTileCols;
      const std::size_t w = std::min(kTileCols, d - c0);
      sum_rows_tile(m, 0, m.rows(), c0, w, out.data() + c0, scratch, 0);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n_tiles);
  if (workers == 1) {
    work(0, n_tiles);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) {
    pool.emplace_back(work, n_tiles * k / workers, n_tiles * (k + 1) / workers);
  }
  for (auto& th : pool) th.join();
  return out;
}

std::vector<double> column_means(const ActivationMatrix& m, unsigned threads) {
  auto sums = column_sums(m, threads);
  scale(1.0 / static_cast<double>(m.rows()), sums);
  return sums;
}

Summary summarize(std::span<const double> x) {
  Summary s;
  s.count = x.size();
  if (x.empty()) return s;
  s.mean = pairwise_sum(x) / static_cast<double>(x.size());
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - s.mean) * (x[i] - s.mean);
  s.std = std::sqrt(pairwise_sum(sq) / static_cast<double>(x.size()));
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = pairwise_sum(x) / static_cast<double>(x.size());
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
  return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

double cosine(std::span<const double> a, std::span<const double> b) noexcept {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

}  // namespace fastcav
