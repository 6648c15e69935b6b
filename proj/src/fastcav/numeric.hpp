#pragma once

// Float64 kernels. Every reduction is pairwise so the error grows with
// log(n) rather than n; activation widths reach 10^6.

#include <cstddef>
#include <span>
#include <vector>

#include "fastcav/matrix.hpp"

namespace fastcav {

double pairwise_sum(std::span<const double> x) noexcept;

/// Pairwise-summed dot product. Sizes must match (unchecked).
double dot(std::span<const double> a, std::span<const double> b) noexcept;

double norm2(std::span<const double> x) noexcept;

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

void scale(double alpha, std::span<double> x) noexcept;

/// Column sums of `m`, pairwise across rows. Columns are processed in
/// cache-sized tiles; `threads` > 1 splits tiles across workers without
/// changing the result.
std::vector<double> column_sums(const ActivationMatrix& m, unsigned threads = 1);

std::vector<double> column_means(const ActivationMatrix& m, unsigned threads = 1);

/// Descriptive statistics (population standard deviation).
struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

Summary summarize(std::span<const double> x);

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than two values.
double sample_variance(std::span<const double> x);

/// cos(a, b); 0 if either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace fastcav
